//! Two-hop network for `T = S1 + S2` over Gaussian sources: encoder 1
//! sees `S1` and talks to encoder 2 at rate `R1`; encoder 2 sees `S2` and
//! talks to the decoder at rate `R2`.
//!
//! Two cut-set lower bounds and the distortion of a separate-per-fraction
//! scheme that re-compresses the overlap at the relay.

use crate::error::{ensure, Error, Result};
use crate::gaussian::sum_dr;
use crate::model::{GaussianPair, SamplingBudget};
use crate::search::{golden_min, grid_golden_min, strictly_better};
use crate::combiner::{OVERLAP_GRID_POINTS, OVERLAP_TOL};

/// Grid size per axis of the inner `(R11, R22)` search.
pub const INNER_GRID_POINTS: usize = 101;

/// Link rates of the two hops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiHopRates {
    pub r1: f64,
    pub r2: f64,
}

impl MultiHopRates {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        ensure(r1 >= 0.0 && r2 >= 0.0, || format!("link rates ({r1}, {r2}) must be nonnegative"))?;
        Ok(Self { r1, r2 })
    }
}

fn check_rho(rho: f64) -> Result<()> {
    GaussianPair::new(rho)?;
    if rho.abs() == 1.0 {
        return Err(Error::Degenerate(format!("rho = {rho} makes the side-information problem trivial")));
    }
    Ok(())
}

/// Which piece of the side-information bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideInfoBranch {
    /// Rate goes to one kind of fraction only.
    Low,
    /// Both the overlap and the `S1`-only fraction receive rate.
    High,
}

/// Lower bound from the cut around encoder 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideInfoBound {
    pub distortion: f64,
    pub theta12_star: f64,
    pub branch: SideInfoBranch,
}

/// Distortion when `S1` is described at rate `r1` to a decoder that sees
/// its own samples of `S2`: the cut around encoder 1.
pub fn sideinfo_lower_bound(r1: f64, budget: &SamplingBudget, rho: f64) -> Result<SideInfoBound> {
    ensure(r1 >= 0.0, || format!("rate {r1} is negative"))?;
    check_rho(rho)?;
    let (lo, hi) = budget.theta12_bounds();
    let (t1, t2) = (budget.theta1(), budget.theta2());
    let a = 1.0 + rho;
    let tail = -a * a * (t1 + t2) + 2.0 * a;
    let theta12 = if rho > 0.0 { lo } else { hi };
    let threshold = if rho > 0.0 {
        0.5 * (t1 - theta12) * (a / (1.0 - rho)).log2()
    } else {
        0.5 * theta12 * ((1.0 - rho) / a).log2()
    };
    if t1 == 0.0 {
        return Ok(SideInfoBound { distortion: tail, theta12_star: theta12, branch: SideInfoBranch::Low });
    }
    let low = r1 <= threshold && threshold > 0.0;
    let (distortion, branch) = if low && rho > 0.0 {
        let excl = t1 - theta12;
        (a * a * excl * (-2.0 * r1 / excl).exp2() + a * a * theta12 + tail, SideInfoBranch::Low)
    } else if low {
        let wz = (1.0 - rho * rho) * theta12;
        (wz * (-2.0 * r1 / theta12).exp2() - wz + a * a * t1 + tail, SideInfoBranch::Low)
    } else {
        let ratio = ((1.0 - rho) / a).powf(theta12 / t1);
        let d = t1 * a * a * ratio * (-2.0 * r1 / t1).exp2() + 2.0 * rho * a * theta12 + tail;
        (d, SideInfoBranch::High)
    };
    Ok(SideInfoBound { distortion, theta12_star: theta12, branch })
}

/// Side-information objective at overlap `theta12` when `r11` of `r1`
/// describes the `S1`-only samples and the rest the overlap.
pub fn sideinfo_objective(budget: &SamplingBudget, rho: f64, theta12: f64, r1: f64, r11: f64) -> f64 {
    let a = 1.0 + rho;
    let (t1, t2) = (budget.theta1(), budget.theta2());
    let excl = t1 - theta12;
    let r12 = (r1 - r11).max(0.0);
    let wz = if theta12 > 0.0 { (1.0 - rho * rho) * theta12 * (-2.0 * r12 / theta12).exp2() } else { 0.0 };
    let only1 = if excl > 0.0 { a * a * excl * (-2.0 * r11 / excl).exp2() } else { 0.0 };
    wz + only1 + 2.0 * rho * a * theta12 - a * a * (t1 + t2) + 2.0 * a
}

/// The side-information bound by direct minimization over the overlap and
/// the rate split. Returns the distortion and the minimizing overlap.
pub fn sideinfo_numeric(r1: f64, budget: &SamplingBudget, rho: f64) -> Result<(f64, f64)> {
    ensure(r1 >= 0.0, || format!("rate {r1} is negative"))?;
    check_rho(rho)?;
    let (lo, hi) = budget.theta12_bounds();
    let inner = |t: f64| golden_min(|x| sideinfo_objective(budget, rho, t, r1, x), 0.0, r1, 1e-10).1;
    let (t, d) = grid_golden_min(inner, lo, hi, OVERLAP_GRID_POINTS, OVERLAP_TOL);
    Ok((d, t.clamp(lo, hi)))
}

/// Lower bound from the cut around the decoder: both sources available at
/// one encoder with link rate `r2`.
pub fn decoder_cut_bound(r2: f64, budget: &SamplingBudget, rho: f64) -> Result<f64> {
    Ok(sum_dr(budget, rho, r2)?.distortion)
}

/// Distortion of the re-compress scheme on samples seen by both encoders,
/// with per-sample rates `r1` and `r2` on the two hops.
pub fn recompress_d0(r1: f64, r2: f64, rho: f64) -> f64 {
    let (r1, r2) = (r1.max(0.0), r2.max(0.0));
    let x2 = (-2.0 * r2).exp2();
    (1.0 - rho * rho) * (1.0 - x2) * (-2.0 * r1).exp2() + 2.0 * (1.0 + rho) * x2
}

/// Optimal operating point of the re-compress scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiHopUpperSolution {
    pub distortion: f64,
    pub theta12_star: f64,
    /// First-hop rate for the `S1`-only samples, forwarded unchanged on the second hop.
    pub r11_star: f64,
    /// Second-hop rate for the overlap.
    pub r22_star: f64,
}

/// Achievable distortion with overlap `theta12` and inner split
/// `(r11, r22)`; `None` when the split does not fit the second hop.
pub fn upper_objective(
    budget: &SamplingBudget,
    rho: f64,
    rates: MultiHopRates,
    theta12: f64,
    r11: f64,
    r22: f64,
) -> Option<f64> {
    let r23 = rates.r2 - r11 - r22;
    if r11 < 0.0 || r22 < 0.0 || r11 > rates.r1 + 1e-15 || r23 < -1e-15 {
        return None;
    }
    let a = 1.0 + rho;
    let (t1, t2) = (budget.theta1(), budget.theta2());
    let only1 = t1 - theta12;
    let only2 = t2 - theta12;
    let mut d = 2.0 * rho * a * theta12 - a * a * (t1 + t2) + 2.0 * a;
    if only1 > 0.0 {
        d += only1 * a * a * (-2.0 * r11 / only1).exp2();
    }
    if theta12 > 0.0 {
        d += theta12 * recompress_d0((rates.r1 - r11).max(0.0) / theta12, r22 / theta12, rho);
    }
    if only2 > 0.0 {
        d += a * a * only2 * (-2.0 * r23.max(0.0) / only2).exp2();
    }
    Some(d)
}

struct Inner {
    value: f64,
    r11: f64,
    r22: f64,
}

fn upper_inner(budget: &SamplingBudget, rho: f64, rates: MultiHopRates, theta12: f64) -> Inner {
    let f = |r11: f64, r22: f64| upper_objective(budget, rho, rates, theta12, r11, r22).unwrap_or(f64::INFINITY);
    let r11_max = rates.r1.min(rates.r2);
    let n = INNER_GRID_POINTS - 1;
    let h11 = r11_max / n as f64;
    let h22 = rates.r2 / n as f64;
    let mut best = Inner { value: f(0.0, 0.0), r11: 0.0, r22: 0.0 };
    for i in 0..=n {
        let r11 = if i == n { r11_max } else { h11 * i as f64 };
        for j in 0..=n {
            let r22 = if j == n { rates.r2 } else { h22 * j as f64 };
            if r11 + r22 > rates.r2 + 1e-15 {
                break;
            }
            let v = f(r11, r22);
            if strictly_better(v, best.value) {
                best = Inner { value: v, r11, r22 };
            }
        }
    }
    // coordinate descent in a shrinking window around the incumbent
    let mut step = h11.max(h22);
    let mut rounds = 0;
    while step > 1e-9 && rounds < 400 {
        rounds += 1;
        let before = best.value;
        let hi11 = r11_max.min(rates.r2 - best.r22);
        let (a, b) = ((best.r11 - step).max(0.0), (best.r11 + step).min(hi11));
        if b > a {
            let (x, v) = golden_min(|x| f(x, best.r22), a, b, 1e-11);
            if strictly_better(v, best.value) {
                best.r11 = x;
                best.value = v;
            }
        }
        let hi22 = rates.r2 - best.r11;
        let (a, b) = ((best.r22 - step).max(0.0), (best.r22 + step).min(hi22));
        if b > a {
            let (y, v) = golden_min(|y| f(best.r11, y), a, b, 1e-11);
            if strictly_better(v, best.value) {
                best.r22 = y;
                best.value = v;
            }
        }
        if before - best.value < 1e-13 {
            step *= 0.5;
        }
    }
    best
}

/// Distortion of the re-compress scheme, minimized over the overlap and the
/// inner rate split.
pub fn multihop_upper_bound(rates: MultiHopRates, budget: &SamplingBudget, rho: f64) -> Result<MultiHopUpperSolution> {
    let rates = MultiHopRates::new(rates.r1, rates.r2)?;
    GaussianPair::new(rho)?;
    let (lo, hi) = budget.theta12_bounds();
    let (theta12, _) =
        grid_golden_min(|t| upper_inner(budget, rho, rates, t.clamp(lo, hi)).value, lo, hi, OVERLAP_GRID_POINTS, OVERLAP_TOL);
    let theta12 = theta12.clamp(lo, hi);
    let inner = upper_inner(budget, rho, rates, theta12);
    Ok(MultiHopUpperSolution { distortion: inner.value, theta12_star: theta12, r11_star: inner.r11, r22_star: inner.r22 })
}
