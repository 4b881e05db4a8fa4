//! Gaussian sources: estimating `S1` itself and estimating `S1 + S2`
//! under mean-squared error.

use crate::error::{Error, Result};
use crate::model::{GaussianPair, SamplingBudget};
use crate::search::{golden_min, grid_golden_min, invert_nonincreasing, strictly_better};
use crate::combiner::{OVERLAP_GRID_POINTS, OVERLAP_TOL};

/// Bracket width of the inner search over the overlap rate.
pub const INNER_RATE_TOL: f64 = 1e-8;

fn check_rate(rate: f64) -> Result<()> {
    if rate >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("rate {rate} is negative")))
    }
}

fn sum_pair(rho: f64) -> Result<GaussianPair> {
    let pair = GaussianPair::new(rho)?;
    if rho == -1.0 {
        return Err(Error::Degenerate("rho = -1 makes S1 + S2 identically zero".into()));
    }
    Ok(pair)
}

/// Solution of the `T = S1` problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySolution {
    pub distortion: f64,
    pub theta12_star: f64,
    /// Rate spent on the fraction where only `S2` is seen.
    pub r2_star: f64,
}

/// Distortion-rate function for `T = S1`.
///
/// Measuring both sources together never helps, so the overlap sits at its
/// minimum. Rate first goes to the samples of `S1`; once their marginal
/// gain drops to that of the `S2`-only samples, both share it.
pub fn identity_dr(budget: &SamplingBudget, rho: f64, rate: f64) -> Result<IdentitySolution> {
    check_rate(rate)?;
    let pair = GaussianPair::new(rho)?;
    let (theta12, _) = budget.theta12_bounds();
    let t1 = budget.theta1();
    let b = budget.theta2() - theta12;
    let rho2 = pair.rho() * pair.rho();
    let threshold = identity_threshold(t1, rho2);
    let (distortion, r2_star) = if t1 == 0.0 && b == 0.0 {
        (1.0, 0.0)
    } else if rate <= threshold || b <= 0.0 {
        let d = if t1 > 0.0 { 1.0 - t1 + t1 * (-2.0 * rate / t1).exp2() } else { 1.0 };
        (d, 0.0)
    } else {
        // common slope x = 2^(-2 R1 / theta1) = rho^2 2^(-2 R2 / b)
        let log_x = (b * rho2.log2() - 2.0 * rate) / (t1 + b);
        let x = log_x.exp2();
        let d = 1.0 - t1 - b * rho2 + (t1 + b) * x;
        (d, b / (t1 + b) * (rate - threshold).max(0.0))
    };
    Ok(IdentitySolution { distortion, theta12_star: theta12, r2_star })
}

fn identity_threshold(theta1: f64, rho2: f64) -> f64 {
    if rho2 == 0.0 {
        f64::INFINITY
    } else {
        0.5 * theta1 * (1.0 / rho2).log2()
    }
}

/// Regime of the `S1 + S2` solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumBranch {
    /// `rho > 0` at rates where all rate goes to the maximal overlap.
    SmallRate,
    /// `rho <= 0`, only the overlap fraction receives rate.
    NonPositiveLow,
    /// `rho <= 0`, the overlap and the exclusive fractions share rate.
    NonPositiveHigh,
    /// `rho > 0` outside the small-rate regime; solved numerically.
    Numeric,
}

impl SumBranch {
    pub fn tag(&self) -> &'static str {
        match self {
            SumBranch::SmallRate => "small-rate",
            SumBranch::NonPositiveLow => "nonpos-low",
            SumBranch::NonPositiveHigh => "nonpos-high",
            SumBranch::Numeric => "numeric",
        }
    }
}

/// Solution of the `T = S1 + S2` problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSumSolution {
    pub distortion: f64,
    pub theta12_star: f64,
    /// Rate spent on the overlap fraction.
    pub r12_star: f64,
    pub branch: SumBranch,
}

/// Objective for `T = S1 + S2` at overlap `theta12` when the overlap gets
/// `r12` of the total `rate` and the exclusive fractions the rest.
pub fn sum_objective(budget: &SamplingBudget, rho: f64, theta12: f64, rate: f64, r12: f64) -> f64 {
    let a = 1.0 + rho;
    let w = budget.theta1() + budget.theta2() - 2.0 * theta12;
    let exclusive = if w > 0.0 { a * a * w * (-2.0 * (rate - r12).max(0.0) / w).exp2() } else { 0.0 };
    let overlap = if theta12 > 0.0 { theta12 * (-2.0 * r12 / theta12).exp2() } else { 0.0 };
    exclusive + 2.0 * a * (1.0 + rho * theta12 + overlap) - a * a * (budget.theta1() + budget.theta2())
}

fn sum_inner(budget: &SamplingBudget, rho: f64, theta12: f64, rate: f64) -> (f64, f64) {
    let w = budget.theta1() + budget.theta2() - 2.0 * theta12;
    let r12 = if rate == 0.0 || theta12 <= 0.0 {
        0.0
    } else if w <= 0.0 {
        rate
    } else {
        golden_min(|x| sum_objective(budget, rho, theta12, rate, x), 0.0, rate, INNER_RATE_TOL).0
    };
    (r12, sum_objective(budget, rho, theta12, rate, r12))
}

/// Distortion-rate function for `T = S1 + S2`, minimized jointly over the
/// overlap and the overlap rate.
pub fn sum_dr(budget: &SamplingBudget, rho: f64, rate: f64) -> Result<GaussianSumSolution> {
    check_rate(rate)?;
    sum_pair(rho)?;
    let (lo, hi) = budget.theta12_bounds();
    let (theta12, distortion) =
        grid_golden_min(|t| sum_inner(budget, rho, t, rate).1, lo, hi, OVERLAP_GRID_POINTS, OVERLAP_TOL);
    let mut theta12 = theta12.clamp(lo, hi);
    let branch = if rho <= 0.0 {
        if rate <= nonpos_threshold(budget, rho) {
            SumBranch::NonPositiveLow
        } else {
            SumBranch::NonPositiveHigh
        }
    } else if rate <= smallrate_threshold(budget, rho) {
        SumBranch::SmallRate
    } else {
        SumBranch::Numeric
    };
    // the closed-form regimes have the maximal overlap optimal; keep it on exact ties
    if branch != SumBranch::Numeric && !strictly_better(distortion, sum_inner(budget, rho, hi, rate).1) {
        theta12 = hi;
    }
    let (r12_star, _) = sum_inner(budget, rho, theta12, rate);
    Ok(GaussianSumSolution { distortion, theta12_star: theta12, r12_star, branch })
}

/// Minimum distortion for `T = S1 + S2` with unlimited rate, and the
/// overlap achieving it. `rho = 0` ties resolve to the minimal overlap.
pub fn sum_dmin(budget: &SamplingBudget, rho: f64) -> Result<(f64, f64)> {
    sum_pair(rho)?;
    let (lo, hi) = budget.theta12_bounds();
    let theta12 = if rho < 0.0 { hi } else { lo };
    let a = 1.0 + rho;
    let d = 2.0 * a * (1.0 + rho * theta12) - a * a * (budget.theta1() + budget.theta2());
    Ok((d.max(0.0), theta12))
}

fn nonpos_threshold(budget: &SamplingBudget, rho: f64) -> f64 {
    let (_, hi) = budget.theta12_bounds();
    if budget.theta1() + budget.theta2() - 2.0 * hi <= 0.0 {
        f64::INFINITY
    } else {
        0.5 * hi * (2.0 / (1.0 + rho)).log2()
    }
}

/// Rate up to which the small-rate closed form holds for `rho > 0`.
pub fn smallrate_threshold(budget: &SamplingBudget, rho: f64) -> f64 {
    let (lo, _) = budget.theta12_bounds();
    0.5 * lo * (2.0 / (1.0 + rho)).log2()
}

/// Closed form for `T = S1 + S2` when `rho <= 0`, where the maximal
/// overlap is optimal at every rate.
pub fn sum_dr_nonpos_rho(budget: &SamplingBudget, rho: f64, rate: f64) -> Result<(f64, SumBranch)> {
    check_rate(rate)?;
    sum_pair(rho)?;
    if rho > 0.0 {
        return Err(Error::Regime(format!("rho = {rho} is positive")));
    }
    let (_, t12) = budget.theta12_bounds();
    let a = 1.0 + rho;
    let w = budget.theta1() + budget.theta2() - 2.0 * t12;
    if rate <= nonpos_threshold(budget, rho) {
        let overlap = if t12 > 0.0 { t12 * (-2.0 * rate / t12).exp2() } else { 0.0 };
        return Ok((2.0 * a * (1.0 - t12 + overlap), SumBranch::NonPositiveLow));
    }
    let log_x = -(2.0 * rate + w * (2.0 / a).log2()) / (t12 + w);
    let d = 2.0 * a * (w + t12) * log_x.exp2() + 2.0 * a * (1.0 + rho * t12)
        - a * a * (budget.theta1() + budget.theta2());
    Ok((d, SumBranch::NonPositiveHigh))
}

/// Closed form for `T = S1 + S2` at small rates when `rho > 0`.
pub fn sum_dr_smallrate(budget: &SamplingBudget, rho: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    sum_pair(rho)?;
    if rho <= 0.0 {
        return Err(Error::Regime(format!("rho = {rho} is not positive")));
    }
    let threshold = smallrate_threshold(budget, rho);
    if rate > threshold * (1.0 + 1e-12) {
        return Err(Error::Regime(format!("rate {rate} exceeds the small-rate threshold {threshold}")));
    }
    let (_, hi) = budget.theta12_bounds();
    let a = 2.0 * (1.0 + rho);
    let overlap = if hi > 0.0 { hi * (-2.0 * rate / hi).exp2() } else { 0.0 };
    Ok(a * (1.0 - hi) + a * overlap)
}

/// Bisection width of the rate in the rate-distortion inverses.
pub const INVERSE_RATE_TOL: f64 = 1e-9;

/// Unlimited-rate distortion floor for `T = S1`.
pub fn identity_dmin(budget: &SamplingBudget, rho: f64) -> Result<f64> {
    let pair = GaussianPair::new(rho)?;
    let (t12, _) = budget.theta12_bounds();
    let rho2 = pair.rho() * pair.rho();
    Ok((budget.theta2() - t12) * (1.0 - rho2) + (1.0 + t12 - budget.theta1() - budget.theta2()))
}

/// Rate-distortion form of [`identity_dr`]: the smallest rate reaching
/// `distortion`, and the solution there. The rate is `+inf` at the floor.
pub fn identity_rd(budget: &SamplingBudget, rho: f64, distortion: f64) -> Result<(f64, IdentitySolution)> {
    let floor = identity_dmin(budget, rho)?;
    if distortion < floor - 1e-12 {
        return Err(Error::InfeasibleDistortion { requested: distortion, floor });
    }
    if distortion <= floor {
        return Ok((f64::INFINITY, identity_dr(budget, rho, 4096.0)?));
    }
    let rate = invert_nonincreasing(
        |r| identity_dr(budget, rho, r).map_or(f64::INFINITY, |s| s.distortion),
        distortion,
        INVERSE_RATE_TOL,
    );
    Ok((rate, identity_dr(budget, rho, rate.min(4096.0))?))
}

/// Rate-distortion form of [`sum_dr`]. The rate is `+inf` at the floor.
pub fn sum_rd(budget: &SamplingBudget, rho: f64, distortion: f64) -> Result<(f64, GaussianSumSolution)> {
    let (floor, _) = sum_dmin(budget, rho)?;
    if distortion < floor - 1e-12 {
        return Err(Error::InfeasibleDistortion { requested: distortion, floor });
    }
    if distortion <= floor {
        return Ok((f64::INFINITY, sum_dr(budget, rho, 4096.0)?));
    }
    let rate = invert_nonincreasing(
        |r| sum_dr(budget, rho, r).map_or(f64::INFINITY, |s| s.distortion),
        distortion,
        INVERSE_RATE_TOL,
    );
    Ok((rate, sum_dr(budget, rho, rate.min(4096.0))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combiner::{builder_for, optimize_overlap};
    use crate::model::Computation;
    use approx::assert_abs_diff_eq;

    fn budget() -> SamplingBudget {
        SamplingBudget::new(0.5, 0.75).unwrap()
    }

    #[test]
    fn identity_examples() {
        let s = identity_dr(&budget(), 0.5, 0.25).unwrap();
        assert_abs_diff_eq!(s.distortion, 0.75, epsilon = 1e-12);
        assert_eq!(s.r2_star, 0.0);
        assert_eq!(s.theta12_star, 0.25);
        let s = identity_dr(&budget(), 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(s.distortion, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.r2_star, 0.25, epsilon = 1e-12);
        let full = SamplingBudget::new(1.0, 0.0).unwrap();
        for r in [0.0, 0.3, 2.0] {
            assert_abs_diff_eq!(identity_dr(&full, 0.7, r).unwrap().distortion, (-2.0 * r).exp2(), epsilon = 1e-14);
        }
    }

    #[test]
    fn identity_matches_combiner_and_keeps_minimal_overlap() {
        let b = budget();
        for i in 0..10 {
            let rho = -0.9 + 1.8 * i as f64 / 9.0;
            let build = builder_for(Computation::GaussianIdentity(GaussianPair::new(rho).unwrap()), b);
            for j in 0..10 {
                let r = 2.0 * j as f64 / 9.0;
                let closed = identity_dr(&b, rho, r).unwrap();
                let generic = optimize_overlap(&b, r, &build).unwrap();
                assert_abs_diff_eq!(closed.distortion, generic.distortion, epsilon = 1e-5);
                if r > 0.0 {
                    assert_eq!(generic.theta12, 0.25, "rho {rho} rate {r}");
                }
            }
        }
    }

    #[test]
    fn sum_examples() {
        let b = budget();
        assert_abs_diff_eq!(sum_dr(&b, 0.5, 0.0).unwrap().distortion, 3.0, epsilon = 1e-12);
        let s = sum_dr(&b, 0.5, 0.04).unwrap();
        assert_abs_diff_eq!(s.distortion, 3.0 * 0.5 + 1.5 * (-0.16_f64).exp2(), epsilon = 1e-9);
        assert_abs_diff_eq!(s.distortion, 2.8425, epsilon = 1e-3);
        assert_eq!(s.theta12_star, 0.5);
        assert_eq!(s.branch, SumBranch::SmallRate);
        let s = sum_dr(&b, -0.5, 0.25).unwrap();
        assert_abs_diff_eq!(s.distortion, 0.75, epsilon = 1e-9);
        assert_eq!(s.theta12_star, 0.5);
        assert!(matches!(sum_dr(&b, -1.0, 1.0), Err(Error::Degenerate(_))));
        assert!(sum_dr(&b, 0.5, -1.0).is_err());
    }

    #[test]
    fn sum_dmin_examples() {
        assert_eq!(sum_dmin(&budget(), 0.5).unwrap(), (0.5625, 0.25));
        let (d, t) = sum_dmin(&SamplingBudget::new(1.0, 1.0).unwrap(), 0.3).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-12);
        assert_eq!(t, 1.0);
        let (d, t) = sum_dmin(&budget(), -0.5).unwrap();
        assert_abs_diff_eq!(d, 0.4375, epsilon = 1e-12);
        assert_eq!(t, 0.5);
        assert_eq!(sum_dmin(&budget(), 0.0).unwrap().1, 0.25);
    }

    #[test]
    fn nonpositive_closed_form() {
        let b = budget();
        let (d, br) = sum_dr_nonpos_rho(&b, -0.5, 0.25).unwrap();
        assert_abs_diff_eq!(d, 0.75, epsilon = 1e-12);
        assert_eq!(br, SumBranch::NonPositiveLow);
        assert_abs_diff_eq!(sum_dr_nonpos_rho(&b, 0.0, 0.0).unwrap().0, 2.0, epsilon = 1e-12);
        let (d, br) = sum_dr_nonpos_rho(&b, -0.5, 1.0).unwrap();
        assert_eq!(br, SumBranch::NonPositiveHigh);
        assert_abs_diff_eq!(d, sum_dr(&b, -0.5, 1.0).unwrap().distortion, epsilon = 1e-6);
        for rho in [-0.9, -0.5, -0.2, 0.0] {
            for k in 0..30 {
                let r = 0.1 * k as f64;
                let closed = sum_dr_nonpos_rho(&b, rho, r).unwrap().0;
                assert_abs_diff_eq!(closed, sum_dr(&b, rho, r).unwrap().distortion, epsilon = 1e-6);
            }
        }
        assert!(matches!(sum_dr_nonpos_rho(&b, 0.2, 1.0), Err(Error::Regime(_))));
    }

    #[test]
    fn smallrate_closed_form() {
        let b = budget();
        assert_abs_diff_eq!(sum_dr_smallrate(&b, 0.5, 0.04).unwrap(), 2.8425, epsilon = 1e-4);
        assert_abs_diff_eq!(sum_dr_smallrate(&b, 0.5, 0.0).unwrap(), 3.0, epsilon = 1e-12);
        let edge = smallrate_threshold(&b, 0.5);
        assert_abs_diff_eq!(edge, 0.0519, epsilon = 1e-4);
        let closed = sum_dr_smallrate(&b, 0.5, edge).unwrap();
        assert_abs_diff_eq!(closed, sum_dr(&b, 0.5, edge).unwrap().distortion, epsilon = 1e-5);
        assert_abs_diff_eq!(closed, sum_dr(&b, 0.5, edge + 1e-7).unwrap().distortion, epsilon = 1e-5);
        assert!(matches!(sum_dr_smallrate(&b, 0.5, 0.06), Err(Error::Regime(_))));
    }

    #[test]
    fn sum_matches_combiner() {
        let b = budget();
        for i in 0..10 {
            let rho = -0.9 + 1.8 * i as f64 / 9.0;
            let build = builder_for(Computation::GaussianSum(GaussianPair::new(rho).unwrap()), b);
            for j in 0..10 {
                let r = 2.0 * j as f64 / 9.0;
                let closed = sum_dr(&b, rho, r).unwrap();
                let generic = optimize_overlap(&b, r, &build).unwrap();
                assert_abs_diff_eq!(closed.distortion, generic.distortion, epsilon = 1e-5);
                assert!(closed.r12_star <= r + 1e-12);
            }
        }
    }

    #[test]
    fn zero_correlation_large_rate_is_overlap_independent() {
        let b = budget();
        let r = 12.0;
        let values: Vec<f64> =
            (0..=10).map(|i| sum_inner(&b, 0.0, 0.25 + 0.025 * i as f64, r).1).collect();
        let spread = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-6);
    }

    #[test]
    fn inverses_round_trip() {
        let b = budget();
        for r in [0.0, 0.04, 0.3, 1.1] {
            let d = sum_dr(&b, 0.5, r).unwrap().distortion;
            assert_abs_diff_eq!(sum_rd(&b, 0.5, d).unwrap().0, r, epsilon = 1e-6);
            let d = identity_dr(&b, -0.4, r).unwrap().distortion;
            assert_abs_diff_eq!(identity_rd(&b, -0.4, d).unwrap().0, r, epsilon = 1e-6);
        }
        let (floor, _) = sum_dmin(&b, 0.5).unwrap();
        assert_eq!(sum_rd(&b, 0.5, floor).unwrap().0, f64::INFINITY);
        assert!(matches!(sum_rd(&b, 0.5, floor - 0.01), Err(Error::InfeasibleDistortion { .. })));
        assert_abs_diff_eq!(identity_dmin(&b, 0.5).unwrap(), 0.5 * 0.75, epsilon = 1e-12);
    }

    #[test]
    fn sum_threshold_transition() {
        let b = budget();
        assert_eq!(sum_dr(&b, 0.5, 0.05).unwrap().theta12_star, 0.5);
        assert_eq!(sum_dr(&b, 0.5, 1.0).unwrap().theta12_star, 0.25);
        let t = sum_dr(&b, 0.5, 0.6).unwrap().theta12_star;
        assert!((t - 0.417).abs() < 0.01, "theta12* {t}");
    }
}
