//! Doubly symmetric binary sources under Hamming distortion: the XOR and
//! AND of the two bits.

use crate::combiner::{OVERLAP_GRID_POINTS, OVERLAP_TOL};
use crate::error::{ensure, Error, Result};
use crate::model::{entropy_bits, inv_entropy_bits, DsbsModel, SamplingBudget};
use crate::primitives::FractionRd;
use crate::search::{bisect_nonincreasing, golden_min, grid_golden_min};

/// Bracket width of the inner search over the overlap distortion.
pub const INNER_DISTORTION_TOL: f64 = 1e-7;

fn check_distortion(d: f64) -> Result<()> {
    ensure(d >= 0.0, || format!("distortion {d} is negative"))
}

/// Rate-distortion function for `T = S1 xor S2`, with the optimal overlap.
///
/// A single source says nothing about the XOR, so only the overlap is
/// useful and it is taken as large as possible. Rates are per sample of
/// the full block, so the overlap's contribution is weighted by its size.
pub fn xor_rd(budget: &SamplingBudget, p: f64, distortion: f64) -> Result<(f64, f64)> {
    let model = DsbsModel::new(p)?;
    check_distortion(distortion)?;
    let (_, theta12) = budget.theta12_bounds();
    let p = model.p();
    if distortion >= p {
        return Ok((0.0, theta12));
    }
    let floor = (1.0 - theta12) * p;
    if distortion < floor - 1e-12 {
        return Err(Error::InfeasibleDistortion { requested: distortion, floor });
    }
    let d12 = ((distortion - floor) / theta12).max(0.0);
    Ok((theta12 * (entropy_bits(p) - entropy_bits(d12)), theta12))
}

/// Distortion-rate form of [`xor_rd`].
pub fn xor_dr(budget: &SamplingBudget, p: f64, rate: f64) -> Result<(f64, f64)> {
    let model = DsbsModel::new(p)?;
    ensure(rate >= 0.0, || format!("rate {rate} is negative"))?;
    let (_, theta12) = budget.theta12_bounds();
    let p = model.p();
    if theta12 == 0.0 {
        return Ok((p, theta12));
    }
    let per_sample = (entropy_bits(p) - rate / theta12).max(0.0);
    let d12 = inv_entropy_bits(per_sample).min(p);
    Ok(((1.0 - theta12) * p + theta12 * d12, theta12))
}

/// Distortion floor of `T = S1 and S2` for a budget, the overlap reaching
/// it and the rate that suffices to reach it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AndFloor {
    pub distortion: f64,
    pub theta12_star: f64,
    pub rmin: f64,
}

/// Minimum distortion for `T = S1 and S2`. Below `p = 1/3` a sample seen by
/// both encoders is worth less than two samples seen by one; `p = 1/3`
/// resolves to the minimal overlap.
pub fn and_dmin(budget: &SamplingBudget, p: f64) -> Result<AndFloor> {
    let model = DsbsModel::new(p)?;
    let p = model.p();
    let (lo, hi) = budget.theta12_bounds();
    let theta12 = if p <= 1.0 / 3.0 { lo } else { hi };
    let sum = budget.theta1() + budget.theta2();
    let distortion = ((1.0 - p) / 2.0 + (p - 0.5) * sum + (1.0 - 3.0 * p) / 2.0 * theta12).max(0.0);
    let rmin = sum - (2.0 - entropy_bits((1.0 - p) / 2.0)) * theta12;
    Ok(AndFloor { distortion, theta12_star: theta12, rmin })
}

/// Optimal operating point of `T = S1 and S2` at a distortion target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryAndSolution {
    pub rate: f64,
    pub theta12_star: f64,
    /// Weighted distortion of the two single-source fractions together.
    pub d3_star: f64,
    /// Weighted distortion of the overlap fraction.
    pub d12_star: f64,
}

fn and_params(p: f64) -> Result<f64> {
    let model = DsbsModel::new(p)?;
    if model.p() >= 0.5 {
        return Err(Error::Degenerate("p = 1/2 leaves the AND indirect problem undefined".into()));
    }
    Ok(model.p())
}

/// Feasible interval of the overlap distortion `D12` at overlap `theta12`.
fn d12_box(budget: &SamplingBudget, p: f64, theta12: f64, distortion: f64) -> Option<(f64, f64, f64)> {
    let w3 = budget.theta1() + budget.theta2() - 2.0 * theta12;
    let none = 1.0 + theta12 - budget.theta1() - budget.theta2();
    let slack = distortion - (1.0 - p) / 2.0 * none.max(0.0);
    let lo = (slack - (1.0 - p) / 2.0 * w3).max(0.0);
    let hi = ((1.0 - p) / 2.0 * theta12).min(slack - p / 2.0 * w3);
    if hi < lo - 1e-13 {
        None
    } else {
        Some((lo, hi.max(lo), slack))
    }
}

/// Total rate at overlap `theta12` when the overlap gets weighted distortion
/// `d12` and the single-source fractions the rest.
fn and_split_rate(budget: &SamplingBudget, p: f64, theta12: f64, d12: f64, slack: f64) -> f64 {
    let w3 = budget.theta1() + budget.theta2() - 2.0 * theta12;
    let overlap = if theta12 > 0.0 {
        theta12 * FractionRd::BinaryDirect { p_t: (1.0 - p) / 2.0 }.rate(d12 / theta12)
    } else {
        0.0
    };
    let single = if w3 > 0.0 {
        let d3 = ((slack - d12) / w3).max(p / 2.0);
        w3 * FractionRd::BinaryAndIndirect { p }.rate(d3)
    } else {
        0.0
    };
    overlap + single
}

fn and_inner(budget: &SamplingBudget, p: f64, theta12: f64, distortion: f64) -> Option<(f64, f64, f64)> {
    let (lo, hi, slack) = d12_box(budget, p, theta12, distortion)?;
    let (d12, rate) = golden_min(|d| and_split_rate(budget, p, theta12, d, slack), lo, hi, INNER_DISTORTION_TOL);
    Some((rate, d12, slack - d12))
}

/// Rate-distortion function for `T = S1 and S2`, minimized over the overlap
/// and the split of the distortion between the overlap and the
/// single-source fractions. The two single-source fractions share a common
/// per-sample distortion.
pub fn and_rd(budget: &SamplingBudget, p: f64, distortion: f64) -> Result<BinaryAndSolution> {
    let p = and_params(p)?;
    check_distortion(distortion)?;
    let (lo, hi) = budget.theta12_bounds();
    if distortion >= (1.0 - p) / 2.0 {
        let w3 = budget.theta1() + budget.theta2() - 2.0 * lo;
        return Ok(BinaryAndSolution {
            rate: 0.0,
            theta12_star: lo,
            d3_star: (1.0 - p) / 2.0 * w3,
            d12_star: (1.0 - p) / 2.0 * lo,
        });
    }
    let floor = and_dmin(budget, p)?.distortion;
    if distortion < floor - 1e-12 {
        return Err(Error::InfeasibleDistortion { requested: distortion, floor });
    }
    let distortion = distortion.max(floor);
    let outer = |t: f64| and_inner(budget, p, t.clamp(lo, hi), distortion).map_or(f64::INFINITY, |s| s.0);
    let (theta12, rate) = grid_golden_min(outer, lo, hi, OVERLAP_GRID_POINTS, OVERLAP_TOL);
    if !rate.is_finite() {
        return Err(Error::InfeasibleDistortion { requested: distortion, floor });
    }
    let theta12 = theta12.clamp(lo, hi);
    let (rate, d12, d3) = and_inner(budget, p, theta12, distortion).ok_or(Error::NoFeasiblePoint)?;
    Ok(BinaryAndSolution { rate, theta12_star: theta12, d3_star: d3, d12_star: d12 })
}

/// Distortion-rate form of [`and_rd`], by bisection on the distortion to
/// `1e-7`. Returns the distortion and the operating point there.
pub fn and_dr(budget: &SamplingBudget, p: f64, rate: f64) -> Result<(f64, BinaryAndSolution)> {
    let p = and_params(p)?;
    ensure(rate >= 0.0, || format!("rate {rate} is negative"))?;
    let floor = and_dmin(budget, p)?.distortion;
    let top = (1.0 - p) / 2.0;
    let at_floor = and_rd(budget, p, floor)?;
    if at_floor.rate <= rate {
        return Ok((floor, at_floor));
    }
    if rate == 0.0 {
        return Ok((top, and_rd(budget, p, top)?));
    }
    let rd = |d: f64| and_rd(budget, p, d).map_or(f64::INFINITY, |s| s.rate);
    let d = bisect_nonincreasing(rd, floor, top, rate, 1e-7);
    // the upper end of the bracket meets the rate budget
    let d = (d + 5e-8).min(top);
    Ok((d, and_rd(budget, p, d)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn budget() -> SamplingBudget {
        SamplingBudget::new(0.5, 0.75).unwrap()
    }

    #[test]
    fn xor_examples() {
        let b = budget();
        assert_eq!(xor_rd(&b, 0.2, 0.2).unwrap(), (0.0, 0.5));
        let h = |x: f64| entropy_bits(x);
        assert_abs_diff_eq!(xor_rd(&b, 0.2, 0.1).unwrap().0, 0.5 * h(0.2), epsilon = 1e-12);
        assert_abs_diff_eq!(xor_rd(&b, 0.2, 0.15).unwrap().0, 0.5 * (h(0.2) - h(0.1)), epsilon = 1e-12);
        assert!(matches!(xor_rd(&b, 0.2, 0.05), Err(Error::InfeasibleDistortion { floor, .. }) if (floor - 0.1).abs() < 1e-15));
    }

    #[test]
    fn xor_depends_only_on_max_overlap() {
        // theta12,max = 0.5 in both budgets
        let a = SamplingBudget::new(0.5, 0.75).unwrap();
        let b = SamplingBudget::new(0.5, 0.5).unwrap();
        for d in [0.1, 0.12, 0.17, 0.2] {
            assert_eq!(xor_rd(&a, 0.2, d).unwrap(), xor_rd(&b, 0.2, d).unwrap());
        }
    }

    #[test]
    fn xor_round_trip() {
        let b = budget();
        for r in [0.0, 0.05, 0.2, 0.36] {
            let (d, _) = xor_dr(&b, 0.2, r).unwrap();
            assert_abs_diff_eq!(xor_rd(&b, 0.2, d).unwrap().0, r, epsilon = 1e-8);
        }
    }

    #[test]
    fn and_floor_examples() {
        let b = budget();
        let f = and_dmin(&b, 0.1).unwrap();
        assert_abs_diff_eq!(f.distortion, 0.0375, epsilon = 1e-12);
        assert_eq!(f.theta12_star, 0.25);
        assert_abs_diff_eq!(f.rmin, 0.9982, epsilon = 5e-4);
        let f = and_dmin(&b, 0.4).unwrap();
        assert_abs_diff_eq!(f.distortion, 0.125, epsilon = 1e-12);
        assert_eq!(f.theta12_star, 0.5);
        assert_abs_diff_eq!(f.rmin, 0.69, epsilon = 5e-3);
        let full = SamplingBudget::new(1.0, 1.0).unwrap();
        let f = and_dmin(&full, 0.3).unwrap();
        assert_abs_diff_eq!(f.distortion, 0.0, epsilon = 1e-12);
        assert_eq!(f.theta12_star, 1.0);
        assert_eq!(and_dmin(&b, 1.0 / 3.0).unwrap().theta12_star, 0.25);
    }

    #[test]
    fn and_rd_examples() {
        let b = budget();
        let s = and_rd(&b, 0.2, 0.4).unwrap();
        assert_eq!(s.rate, 0.0);
        let s = and_rd(&b, 0.1, 0.0375).unwrap();
        assert_abs_diff_eq!(s.rate, 0.9982, epsilon = 2e-3);
        assert!(matches!(and_rd(&b, 0.1, 0.03), Err(Error::InfeasibleDistortion { .. })));
        assert!(matches!(and_rd(&b, 0.5, 0.3), Err(Error::Degenerate(_))));
    }

    #[test]
    fn and_solution_satisfies_constraints() {
        let b = budget();
        for (p, d) in [(0.1, 0.1), (0.2, 0.2), (0.4, 0.2), (0.2, 0.09)] {
            let s = and_rd(&b, p, d).unwrap();
            let t = s.theta12_star;
            let w3 = 1.25 - 2.0 * t;
            let none = (t - 0.25).max(0.0);
            assert_abs_diff_eq!(s.d3_star + s.d12_star + (1.0 - p) / 2.0 * none, d, epsilon = 1e-8);
            assert!(s.d12_star >= -1e-12 && s.d12_star <= (1.0 - p) * t / 2.0 + 1e-12);
            assert!(s.d3_star >= p * w3 / 2.0 - 1e-12 && s.d3_star <= (1.0 - p) * w3 / 2.0 + 1e-12);
        }
    }

    #[test]
    fn and_rd_reaches_rmin_at_floor() {
        let b = budget();
        for p in [0.1, 0.2, 0.4] {
            let f = and_dmin(&b, p).unwrap();
            let s = and_rd(&b, p, f.distortion).unwrap();
            assert_abs_diff_eq!(s.rate, f.rmin, epsilon = 2e-3);
        }
    }

    #[test]
    fn and_rd_is_convex_nonincreasing() {
        let b = budget();
        let p = 0.2;
        let lo = and_dmin(&b, p).unwrap().distortion;
        let hi = (1.0 - p) / 2.0;
        let rates: Vec<f64> =
            (0..50).map(|i| and_rd(&b, p, lo + (hi - lo) * i as f64 / 49.0).unwrap().rate).collect();
        assert!(rates.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        assert!(rates.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] >= -1e-6), "{rates:?}");
    }

    #[test]
    fn high_crossover_always_uses_max_overlap() {
        let b = budget();
        let lo = and_dmin(&b, 0.4).unwrap().distortion;
        for i in 0..10 {
            let d = lo + (0.3 - lo) * i as f64 / 10.0;
            assert_eq!(and_rd(&b, 0.4, d).unwrap().theta12_star, 0.5, "D = {d}");
        }
    }

    #[test]
    fn and_dr_round_trip() {
        let b = budget();
        for r in [0.1, 0.5] {
            let (d, s) = and_dr(&b, 0.2, r).unwrap();
            assert!(s.rate <= r + 1e-6);
            assert_abs_diff_eq!(and_rd(&b, 0.2, d).unwrap().rate, r, epsilon = 1e-4);
        }
        let (d, _) = and_dr(&b, 0.2, 2.0).unwrap();
        assert_eq!(d, and_dmin(&b, 0.2).unwrap().distortion);
    }
}
