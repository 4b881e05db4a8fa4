//! Trading average distortion against the worst distortion seen by any
//! sampling fraction.
//!
//! The objective is `average + mu * worst`. Whenever some samples go
//! unobserved, the worst fraction is the unobserved one at `Dmax` and the
//! penalty is a constant. Only at the minimal overlap of a budget with
//! `theta1 + theta2 >= 1` does every sample get observed, and there the
//! penalty shapes the rate allocation.

use crate::combiner::{distortion_rate_profile, optimize_overlap, FractionDecomposition, RateAllocation};
use crate::error::{ensure, Result};
use crate::model::SamplingBudget;
use crate::search::{golden_min, strictly_better};

/// Grid size of the one-dimensional boundary search.
pub const BOUNDARY_GRID_POINTS: usize = 4096;
/// Bisection width of the transition weight.
pub const MU_TOL: f64 = 1e-4;

const NESTED_TOL: f64 = 1e-10;

/// Largest per-sample distortion over the nonempty fractions.
pub fn worst_case_term(decomp: &FractionDecomposition, alloc: &RateAllocation) -> f64 {
    decomp.per_fraction_distortions(alloc).into_iter().fold(0.0, f64::max)
}

/// `average + mu * worst` for an explicit allocation.
pub fn dmu_value(decomp: &FractionDecomposition, alloc: &RateAllocation, mu: f64) -> f64 {
    decomp.evaluate(alloc) + mu * worst_case_term(decomp, alloc)
}

fn check(rate: f64, mu: f64) -> Result<()> {
    ensure(rate >= 0.0, || format!("rate {rate} is negative"))?;
    ensure(mu >= 0.0, || format!("weight mu = {mu} is negative"))
}

/// Minimum of `average + mu * worst` for one profile, with an allocation
/// achieving it.
pub fn dmu_profile(decomp: &FractionDecomposition, rate: f64, mu: f64) -> Result<(f64, RateAllocation)> {
    check(rate, mu)?;
    if mu == 0.0 || decomp.weights.none > 1e-15 {
        let (avg, alloc) = distortion_rate_profile(decomp, rate)?;
        return Ok((avg + mu * worst_case_term(decomp, &alloc), alloc));
    }
    let alloc = if decomp.exclusive_symmetric() { merged_search(decomp, rate, mu) } else { nested_search(decomp, rate, mu) };
    Ok((dmu_value(decomp, &alloc, mu), alloc))
}

/// Allocation with the two single-source fractions merged and sharing rate
/// in proportion to their sizes, leaving a single split against the
/// overlap.
fn merged_allocation(decomp: &FractionDecomposition, rate: f64, r12: f64) -> RateAllocation {
    let w = decomp.weights;
    let excl = w.only1 + w.only2;
    let rest = (rate - r12).max(0.0);
    if excl <= 0.0 {
        return RateAllocation { r1: 0.0, r2: 0.0, r12: rate };
    }
    RateAllocation { r1: rest * w.only1 / excl, r2: rest * w.only2 / excl, r12 }
}

fn merged_search(decomp: &FractionDecomposition, rate: f64, mu: f64) -> RateAllocation {
    if decomp.weights.overlap <= 1e-15 {
        return merged_allocation(decomp, rate, 0.0);
    }
    if decomp.weights.only1 + decomp.weights.only2 <= 1e-15 {
        return merged_allocation(decomp, rate, rate);
    }
    let f = |x: f64| dmu_value(decomp, &merged_allocation(decomp, rate, x), mu);
    let n = BOUNDARY_GRID_POINTS - 1;
    let step = rate / n as f64;
    let at = |i: usize| if i == n { rate } else { step * i as f64 };
    let (mut best_i, mut best_v) = (0, f(0.0));
    for i in 1..=n {
        let v = f(at(i));
        if strictly_better(v, best_v) {
            best_i = i;
            best_v = v;
        }
    }
    let (x, v) = golden_min(f, at(best_i.saturating_sub(1)), at((best_i + 1).min(n)), 1e-12);
    let r12 = if strictly_better(v, best_v) { x } else { at(best_i) };
    merged_allocation(decomp, rate, r12)
}

fn nested_search(decomp: &FractionDecomposition, rate: f64, mu: f64) -> RateAllocation {
    // `average + mu * max` is jointly convex in the allocation
    let f = |r1: f64, r2: f64| {
        let alloc = RateAllocation { r1, r2, r12: (rate - r1 - r2).max(0.0) };
        dmu_value(decomp, &alloc, mu)
    };
    let inner = |r1: f64| golden_min(|r2| f(r1, r2), 0.0, rate - r1, NESTED_TOL);
    let (r1, _) = golden_min(|r1| inner(r1).1, 0.0, rate, NESTED_TOL);
    let (r2, _) = inner(r1);
    RateAllocation { r1, r2, r12: (rate - r1 - r2).max(0.0) }
}

/// Budget-level optimum of `average + mu * worst`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstCaseOptimum {
    pub distortion: f64,
    pub theta12_star: f64,
    /// Best value over overlaps that leave samples unobserved, where the
    /// penalty is `mu * Dmax`.
    pub interior: f64,
    /// Value at the minimal overlap.
    pub boundary: f64,
}

/// Minimizes `average + mu * worst` over the overlap: the best overlap with
/// the constant penalty against the minimal overlap with the allocation
/// re-optimized. Ties resolve to the minimal overlap.
pub fn dmu_budget<F>(budget: &SamplingBudget, rate: f64, mu: f64, decomp_builder: F) -> Result<WorstCaseOptimum>
where
    F: Fn(f64) -> FractionDecomposition,
{
    check(rate, mu)?;
    let (lo, _) = budget.theta12_bounds();
    let base = optimize_overlap(budget, rate, &decomp_builder)?;
    let d_max = decomp_builder(lo).d_max;
    let interior = base.distortion + mu * d_max;
    let (boundary, _) = dmu_profile(&decomp_builder(lo), rate, mu)?;
    let (distortion, theta12_star) =
        if strictly_better(interior, boundary) { (interior, base.theta12) } else { (boundary, lo) };
    Ok(WorstCaseOptimum { distortion, theta12_star, interior, boundary })
}

/// Smallest weight `mu` at which the minimal overlap becomes optimal,
/// located by bisection on the sign of `boundary - interior` (nonincreasing
/// in `mu`). `None` if the minimal overlap never wins up to `mu = 1e6`.
pub fn mu_threshold<F>(budget: &SamplingBudget, rate: f64, decomp_builder: F) -> Result<Option<f64>>
where
    F: Fn(f64) -> FractionDecomposition,
{
    let wins = |mu: f64| -> Result<bool> {
        let o = dmu_budget(budget, rate, mu, &decomp_builder)?;
        Ok(!strictly_better(o.interior, o.boundary))
    };
    if wins(0.0)? {
        return Ok(Some(0.0));
    }
    let mut hi = 0.01;
    while !wins(hi)? {
        hi *= 2.0;
        if hi > 1e6 {
            return Ok(None);
        }
    }
    let mut lo = 0.0;
    while hi - lo > MU_TOL {
        let mid = 0.5 * (lo + hi);
        if wins(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
