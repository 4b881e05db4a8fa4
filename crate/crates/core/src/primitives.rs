//! Single-fraction rate-distortion building blocks.
//!
//! Each fraction of a sampling profile is described by one of a handful of
//! elementary distortion-rate functions: direct description of a Gaussian
//! or binary target, indirect description of a Gaussian target through a
//! correlated observation, and indirect description of `S1 and S2` through
//! `S1` alone. [`FractionRd`] wraps them behind one interface for the
//! profile combiner.

use crate::error::{ensure, Error, Result};
use crate::model::{entropy_bits, inv_entropy_bits};
use crate::search::{bisect_nonincreasing, golden_min};

/// Grid size of the reference evaluation of the AND indirect rate.
const AND_GRID_POINTS: usize = 4096;

/// `variance * 2^(-2 rate)`.
pub fn gaussian_direct_dr(variance: f64, rate: f64) -> Result<f64> {
    ensure(variance >= 0.0, || format!("variance {variance} is negative"))?;
    ensure(rate >= 0.0, || format!("rate {rate} is negative"))?;
    Ok(variance * (-2.0 * rate).exp2())
}

/// MMSE of a Gaussian target described through an observation whose
/// correlation with the target is `rho_tilde`:
/// `variance * (1 - rho_tilde^2 + rho_tilde^2 2^(-2 rate))`.
pub fn gaussian_indirect_dr(rho_tilde: f64, variance: f64, rate: f64) -> Result<f64> {
    ensure(rho_tilde.abs() <= 1.0, || format!("correlation {rho_tilde} outside [-1, 1]"))?;
    ensure(variance >= 0.0, || format!("variance {variance} is negative"))?;
    ensure(rate >= 0.0, || format!("rate {rate} is negative"))?;
    let r2 = rho_tilde * rho_tilde;
    Ok(variance * (1.0 - r2 + r2 * (-2.0 * rate).exp2()))
}

/// Rate-distortion function of a Bernoulli(`p_t`) target under Hamming
/// distortion: `h(p_t) - h(d)` below the prior error, zero above it.
pub fn binary_direct_rd(p_t: f64, distortion: f64) -> Result<f64> {
    ensure((0.0..=1.0).contains(&p_t), || format!("probability {p_t} outside [0, 1]"))?;
    ensure(distortion >= 0.0, || format!("distortion {distortion} is negative"))?;
    let q = p_t.min(1.0 - p_t);
    if distortion >= q {
        return Ok(0.0);
    }
    Ok((entropy_bits(q) - entropy_bits(distortion)).max(0.0))
}

/// Inverse of [`binary_direct_rd`]: the Hamming distortion reached at `rate`.
pub fn binary_direct_dr(p_t: f64, rate: f64) -> Result<f64> {
    ensure((0.0..=1.0).contains(&p_t), || format!("probability {p_t} outside [0, 1]"))?;
    ensure(rate >= 0.0, || format!("rate {rate} is negative"))?;
    Ok(binary_direct_distortion(p_t.min(1.0 - p_t), rate))
}

fn binary_direct_distortion(q: f64, rate: f64) -> f64 {
    let hq = entropy_bits(q);
    if rate >= hq {
        0.0
    } else {
        inv_entropy_bits(hq - rate)
    }
}

fn check_and_params(p: f64) -> Result<()> {
    ensure((0.0..=0.5).contains(&p), || format!("crossover probability {p} outside [0, 1/2]"))?;
    if p >= 0.5 {
        return Err(Error::Degenerate(
            "p = 1/2 collapses the indirect AND interval (T independent of S1)".into(),
        ));
    }
    Ok(())
}

/// Mutual information `I(S1; T_hat)` along the line where the distortion
/// constraint is tight, parameterized by `y = P(T_hat = 1 | S1 = 1)`.
#[inline]
fn and_indirect_objective(p: f64, d: f64, y: f64) -> f64 {
    entropy_bits(d + y * (1.0 - p) + (p - 1.0) / 2.0)
        - 0.5 * entropy_bits(y)
        - 0.5 * entropy_bits(2.0 * d + y * (1.0 - 2.0 * p) + p - 1.0)
}

/// Lower end of the admissible `y` interval.
#[inline]
fn and_indirect_y_floor(p: f64, d: f64) -> f64 {
    ((1.0 - p - 2.0 * d) / (1.0 - 2.0 * p)).clamp(0.0, 1.0)
}

/// Which regime the indirect AND rate is in at distortion `d`.
enum AndRegime {
    Lossless,
    Zero,
    Interior,
}

fn and_regime(p: f64, d: f64) -> Result<AndRegime> {
    let floor = p / 2.0;
    if d < floor - 1e-15 {
        return Err(Error::InfeasibleDistortion { requested: d, floor });
    }
    if d >= (1.0 - p) / 2.0 {
        Ok(AndRegime::Zero)
    } else if d <= floor {
        Ok(AndRegime::Lossless)
    } else {
        Ok(AndRegime::Interior)
    }
}

/// Indirect rate-distortion function of `T = S1 and S2` when only `S1` is
/// observed.
///
/// The inner minimum over `y` is found by a dense grid followed by
/// golden-section refinement around the best grid point, without assuming
/// anything about the shape of the objective.
pub fn binary_and_indirect_rd(p: f64, distortion: f64) -> Result<f64> {
    check_and_params(p)?;
    match and_regime(p, distortion)? {
        AndRegime::Zero => Ok(0.0),
        AndRegime::Lossless => Ok(1.0),
        AndRegime::Interior => {
            let lo = and_indirect_y_floor(p, distortion);
            let step = (1.0 - lo) / (AND_GRID_POINTS - 1) as f64;
            let mut best = (lo, and_indirect_objective(p, distortion, lo));
            for i in 1..AND_GRID_POINTS {
                let y = if i + 1 == AND_GRID_POINTS { 1.0 } else { lo + step * i as f64 };
                let v = and_indirect_objective(p, distortion, y);
                if v < best.1 {
                    best = (y, v);
                }
            }
            let a = (best.0 - step).max(lo);
            let b = (best.0 + step).min(1.0);
            let (_, v) = golden_min(|y| and_indirect_objective(p, distortion, y), a, b, 1e-9);
            Ok(v.min(best.1).max(0.0))
        }
    }
}

/// Same quantity as [`binary_and_indirect_rd`], computed by golden section
/// alone. `I(S1; T_hat)` is convex in the test channel, hence convex along
/// the tight-constraint line, so the search is exact; inner loops use this.
pub(crate) fn and_indirect_rate_fast(p: f64, d: f64) -> f64 {
    if d >= (1.0 - p) / 2.0 {
        return 0.0;
    }
    if d <= p / 2.0 {
        return 1.0;
    }
    let lo = and_indirect_y_floor(p, d);
    let (_, v) = golden_min(|y| and_indirect_objective(p, d, y), lo, 1.0, 1e-11);
    v.max(0.0)
}

/// Distortion-rate form of [`binary_and_indirect_rd`], by bisection on the
/// distortion to `1e-8`.
pub fn binary_and_indirect_dr(p: f64, rate: f64) -> Result<f64> {
    check_and_params(p)?;
    ensure(rate >= 0.0, || format!("rate {rate} is negative"))?;
    if rate >= 1.0 {
        return Ok(p / 2.0);
    }
    if rate == 0.0 {
        return Ok((1.0 - p) / 2.0);
    }
    let rd = |d: f64| binary_and_indirect_rd(p, d).unwrap_or(f64::INFINITY);
    Ok(bisect_nonincreasing(rd, p / 2.0, (1.0 - p) / 2.0, rate, 1e-8))
}

fn and_indirect_distortion_fast(p: f64, rate: f64) -> f64 {
    if rate >= 1.0 {
        return p / 2.0;
    }
    if rate <= 0.0 {
        return (1.0 - p) / 2.0;
    }
    bisect_nonincreasing(|d| and_indirect_rate_fast(p, d), p / 2.0, (1.0 - p) / 2.0, rate, 1e-10)
}

/// Per-sample distortion-rate function of one sampling fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FractionRd {
    /// Observation carries no information about the target.
    Constant(f64),
    /// Direct description of a Gaussian target.
    GaussianDirect { variance: f64 },
    /// Gaussian target seen through an observation with correlation `rho_tilde`.
    GaussianIndirect { variance: f64, rho_tilde: f64 },
    /// Direct description of a Bernoulli(`p_t`) target.
    BinaryDirect { p_t: f64 },
    /// `S1 and S2` seen through one source of a DSBS with crossover `p`.
    BinaryAndIndirect { p: f64 },
}

impl FractionRd {
    /// Distortion at per-sample rate `rate` (which may be `+inf`).
    pub fn distortion(&self, rate: f64) -> f64 {
        let rate = rate.max(0.0);
        match *self {
            FractionRd::Constant(d) => d,
            FractionRd::GaussianDirect { variance } => variance * (-2.0 * rate).exp2(),
            FractionRd::GaussianIndirect { variance, rho_tilde } => {
                let r2 = rho_tilde * rho_tilde;
                variance * (1.0 - r2 + r2 * (-2.0 * rate).exp2())
            }
            FractionRd::BinaryDirect { p_t } => binary_direct_distortion(p_t.min(1.0 - p_t), rate),
            FractionRd::BinaryAndIndirect { p } => and_indirect_distortion_fast(p, rate),
        }
    }

    /// Per-sample rate needed for distortion `d`; `+inf` below the floor of
    /// an asymptotic function.
    pub fn rate(&self, d: f64) -> f64 {
        match *self {
            FractionRd::Constant(c) => {
                if d >= c {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            FractionRd::GaussianDirect { .. } | FractionRd::GaussianIndirect { .. } => {
                let (floor, amp) = self.exponential_parts().unwrap_or((0.0, 0.0));
                if d >= floor + amp {
                    0.0
                } else if d <= floor {
                    f64::INFINITY
                } else {
                    0.5 * (amp / (d - floor)).log2()
                }
            }
            FractionRd::BinaryDirect { p_t } => {
                let q = p_t.min(1.0 - p_t);
                if d >= q {
                    0.0
                } else {
                    entropy_bits(q) - entropy_bits(d.max(0.0))
                }
            }
            FractionRd::BinaryAndIndirect { p } => {
                if d < p / 2.0 {
                    f64::INFINITY
                } else {
                    and_indirect_rate_fast(p, d)
                }
            }
        }
    }

    /// Distortion at zero rate.
    pub fn d_max(&self) -> f64 {
        self.distortion(0.0)
    }

    /// Distortion with unlimited rate.
    pub fn d_min(&self) -> f64 {
        match *self {
            FractionRd::Constant(d) => d,
            FractionRd::GaussianDirect { .. } => 0.0,
            FractionRd::GaussianIndirect { variance, rho_tilde } => variance * (1.0 - rho_tilde * rho_tilde),
            FractionRd::BinaryDirect { .. } => 0.0,
            FractionRd::BinaryAndIndirect { p } => p / 2.0,
        }
    }

    /// `D(r) = floor + amp 2^(-2r)` decomposition of the Gaussian families.
    fn exponential_parts(&self) -> Option<(f64, f64)> {
        match *self {
            FractionRd::GaussianDirect { variance } => Some((0.0, variance)),
            FractionRd::GaussianIndirect { variance, rho_tilde } => {
                let r2 = rho_tilde * rho_tilde;
                Some((variance * (1.0 - r2), variance * r2))
            }
            _ => None,
        }
    }

    /// Marginal distortion reduction per bit, `-D'(r)`, at zero rate.
    pub fn max_gain(&self) -> f64 {
        match *self {
            FractionRd::Constant(_) => 0.0,
            FractionRd::GaussianDirect { .. } | FractionRd::GaussianIndirect { .. } => {
                let (_, amp) = self.exponential_parts().unwrap_or((0.0, 0.0));
                2.0 * std::f64::consts::LN_2 * amp
            }
            FractionRd::BinaryDirect { p_t } => {
                let q = p_t.min(1.0 - p_t);
                if q <= 0.0 {
                    0.0
                } else {
                    1.0 / ((1.0 - q) / q).log2()
                }
            }
            FractionRd::BinaryAndIndirect { p } => {
                // one-sided slope of R(D) at the zero-rate distortion, Richardson-extrapolated
                let top = (1.0 - p) / 2.0;
                let h = 1e-5 * (top - p / 2.0);
                let s1 = and_indirect_rate_fast(p, top - h) / h;
                let s2 = and_indirect_rate_fast(p, top - 2.0 * h) / (2.0 * h);
                1.0 / (2.0 * s1 - s2)
            }
        }
    }

    /// Per-sample rate at which the marginal gain `-D'(r)` falls to `gain`,
    /// or zero if it is already below `gain` at zero rate. At zero gain this
    /// is the rate where the function stops decreasing (`+inf` if never).
    pub fn rate_at_gain(&self, gain: f64) -> f64 {
        match *self {
            FractionRd::Constant(_) => 0.0,
            FractionRd::GaussianDirect { .. } | FractionRd::GaussianIndirect { .. } => {
                let (_, amp) = self.exponential_parts().unwrap_or((0.0, 0.0));
                let g0 = 2.0 * std::f64::consts::LN_2 * amp;
                if g0 <= gain || amp <= 0.0 {
                    0.0
                } else {
                    0.5 * (g0 / gain).log2()
                }
            }
            FractionRd::BinaryDirect { p_t } => {
                let q = p_t.min(1.0 - p_t);
                if q <= 0.0 {
                    return 0.0;
                }
                if gain <= 0.0 {
                    return entropy_bits(q);
                }
                // -D'(r) = 1 / log2((1 - D) / D)
                let d = 1.0 / (1.0 + (1.0 / gain).exp2());
                if d >= q {
                    0.0
                } else {
                    entropy_bits(q) - entropy_bits(d)
                }
            }
            FractionRd::BinaryAndIndirect { p } => {
                if gain <= 0.0 {
                    return 1.0;
                }
                // D + gain R(D) is convex; its minimizer has R'(D) = -1 / gain
                let (d, _) = golden_min(|d| d + gain * and_indirect_rate_fast(p, d), p / 2.0, (1.0 - p) / 2.0, 1e-12);
                and_indirect_rate_fast(p, d)
            }
        }
    }
}
