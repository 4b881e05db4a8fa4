//! Profile-level distortion-rate and rate-distortion functions.
//!
//! For a fixed sampling profile the four fractions can be coded
//! separately, so the profile distortion at link rate `R` is
//!
//! ```text
//! min  w1 D1(R1/w1) + w12 D12(R12/w12) + w2 D2(R2/w2) + w0 Dmax
//! s.t. R1 + R12 + R2 <= R
//! ```
//!
//! where zero-weight fractions contribute nothing. The allocation is found
//! by reverse water-filling: bisection on the common slope `-D'`, which
//! each fraction inverts in closed form or, for the AND fraction, by a
//! one-dimensional convex search.
//! The budget-level function minimizes over the overlap `theta12`.

use crate::error::{ensure, Error, Result};
use crate::model::{Computation, FractionWeights, SamplingBudget, SamplingProfile};
use crate::primitives::FractionRd;
use crate::search::{bisect_nonincreasing, grid_golden_min};

/// Grid size of the outer search over `theta12`.
pub const OVERLAP_GRID_POINTS: usize = 201;
/// Final bracket width of the outer search over `theta12`.
pub const OVERLAP_TOL: f64 = 1e-6;

const ACTIVE_EPS: f64 = 1e-15;

/// The four weighted per-fraction distortion-rate functions of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionDecomposition {
    pub weights: FractionWeights,
    /// Fraction where only `S1` is measured.
    pub only1: FractionRd,
    /// Fraction where both sources are measured.
    pub overlap: FractionRd,
    /// Fraction where only `S2` is measured.
    pub only2: FractionRd,
    /// Best constant-estimate distortion of the target.
    pub d_max: f64,
}

/// Rates (normalized by the full block length) assigned to each fraction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateAllocation {
    pub r1: f64,
    pub r2: f64,
    pub r12: f64,
}

impl RateAllocation {
    pub fn total(&self) -> f64 {
        self.r1 + self.r2 + self.r12
    }
}

/// Weighted distortions contributed by the three observed fractions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DistortionAllocation {
    pub d1: f64,
    pub d2: f64,
    pub d12: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Only1,
    Overlap,
    Only2,
}

impl FractionDecomposition {
    pub fn new(
        weights: FractionWeights,
        only1: FractionRd,
        overlap: FractionRd,
        only2: FractionRd,
        d_max: f64,
    ) -> Result<Self> {
        let ws = [weights.only1, weights.overlap, weights.only2, weights.none];
        ensure(ws.iter().all(|w| *w >= 0.0), || format!("negative fraction weight in {weights:?}"))?;
        ensure((weights.sum() - 1.0).abs() <= 1e-12, || format!("weights sum to {}", weights.sum()))?;
        ensure(d_max >= 0.0, || format!("d_max {d_max} is negative"))?;
        Ok(Self { weights, only1, overlap, only2, d_max })
    }

    /// Decomposition of one of the shipped source/target pairs.
    pub fn for_computation(computation: &Computation, profile: &SamplingProfile) -> Self {
        let weights = profile.weights();
        let (only, overlap, d_max, only2) = match *computation {
            Computation::GaussianIdentity(g) => (
                FractionRd::GaussianDirect { variance: 1.0 },
                FractionRd::GaussianDirect { variance: 1.0 },
                1.0,
                Some(FractionRd::GaussianIndirect { variance: 1.0, rho_tilde: g.rho().abs() }),
            ),
            Computation::GaussianSum(g) => {
                let var = g.sum_variance();
                (
                    FractionRd::GaussianIndirect { variance: var, rho_tilde: g.rho_tilde() },
                    FractionRd::GaussianDirect { variance: var },
                    var,
                    None,
                )
            }
            Computation::BinaryXor(m) => {
                (FractionRd::Constant(m.p()), FractionRd::BinaryDirect { p_t: m.p() }, m.p(), None)
            }
            Computation::BinaryAnd(m) => {
                let p_t = (1.0 - m.p()) / 2.0;
                (FractionRd::BinaryAndIndirect { p: m.p() }, FractionRd::BinaryDirect { p_t }, p_t, None)
            }
        };
        Self { weights, only1: only, overlap, only2: only2.unwrap_or(only), d_max }
    }

    /// Both single-source fractions share the same distortion-rate function.
    pub fn exclusive_symmetric(&self) -> bool {
        self.only1 == self.only2
    }

    fn active(&self) -> Vec<(Slot, f64, FractionRd)> {
        [
            (Slot::Only1, self.weights.only1, self.only1),
            (Slot::Overlap, self.weights.overlap, self.overlap),
            (Slot::Only2, self.weights.only2, self.only2),
        ]
        .into_iter()
        .filter(|(_, w, _)| *w > ACTIVE_EPS)
        .collect()
    }

    /// Profile distortion for an explicit allocation.
    pub fn evaluate(&self, alloc: &RateAllocation) -> f64 {
        let d = self.distortion_split(alloc);
        d.d1 + d.d2 + d.d12 + self.weights.none * self.d_max
    }

    /// Weighted distortion of each observed fraction under `alloc`.
    pub fn distortion_split(&self, alloc: &RateAllocation) -> DistortionAllocation {
        let part = |w: f64, f: &FractionRd, r: f64| if w > ACTIVE_EPS { w * f.distortion(r / w) } else { 0.0 };
        DistortionAllocation {
            d1: part(self.weights.only1, &self.only1, alloc.r1),
            d2: part(self.weights.only2, &self.only2, alloc.r2),
            d12: part(self.weights.overlap, &self.overlap, alloc.r12),
        }
    }

    /// Per-fraction distortion (unweighted) of every nonempty fraction,
    /// including the unobserved one.
    pub fn per_fraction_distortions(&self, alloc: &RateAllocation) -> Vec<f64> {
        let mut out = Vec::with_capacity(4);
        if self.weights.only1 > ACTIVE_EPS {
            out.push(self.only1.distortion(alloc.r1 / self.weights.only1));
        }
        if self.weights.overlap > ACTIVE_EPS {
            out.push(self.overlap.distortion(alloc.r12 / self.weights.overlap));
        }
        if self.weights.only2 > ACTIVE_EPS {
            out.push(self.only2.distortion(alloc.r2 / self.weights.only2));
        }
        if self.weights.none > ACTIVE_EPS {
            out.push(self.d_max);
        }
        out
    }
}

fn allocation_from(parts: &[(Slot, f64)]) -> RateAllocation {
    let mut a = RateAllocation::default();
    for (slot, x) in parts {
        match slot {
            Slot::Only1 => a.r1 = *x,
            Slot::Overlap => a.r12 = *x,
            Slot::Only2 => a.r2 = *x,
        }
    }
    a
}

/// Minimum profile distortion at link rate `rate` and an allocation
/// achieving it.
pub fn distortion_rate_profile(decomp: &FractionDecomposition, rate: f64) -> Result<(f64, RateAllocation)> {
    ensure(rate >= 0.0, || format!("rate {rate} is negative"))?;
    let active = decomp.active();
    let alloc = if rate == 0.0 || active.is_empty() { RateAllocation::default() } else { water_fill(&active, rate) };
    Ok((decomp.evaluate(&alloc), alloc))
}

fn water_fill(active: &[(Slot, f64, FractionRd)], rate: f64) -> RateAllocation {
    let total_at = |g: f64| -> f64 {
        active.iter().map(|(_, w, f)| w * f.rate_at_gain(g)).sum()
    };
    let g_max = active
        .iter()
        .map(|(_, _, f)| f.max_gain())
        .fold(0.0_f64, f64::max)
        .min(1e300);
    if g_max <= 0.0 {
        return RateAllocation::default();
    }
    if total_at(0.0) <= rate {
        let parts: Vec<(Slot, f64)> = active.iter().map(|(s, w, f)| (*s, w * f.rate_at_gain(0.0))).collect();
        return allocation_from(&parts);
    }
    // g_hi hands out no rate at all; walk g_lo down until it hands out at least `rate`.
    let mut g_hi = g_max;
    let mut g_lo = g_max;
    let mut saturated = false;
    loop {
        g_lo *= 0.5;
        if total_at(g_lo) >= rate {
            break;
        }
        g_hi = g_lo;
        if g_lo < 1e-290 {
            saturated = true;
            break;
        }
    }
    if !saturated {
        for _ in 0..300 {
            let mid = (g_lo * g_hi).sqrt();
            if total_at(mid) >= rate {
                g_lo = mid;
            } else {
                g_hi = mid;
            }
            if g_hi - g_lo <= 1e-12 * g_hi {
                break;
            }
        }
    }
    let mut parts: Vec<(Slot, f64)> =
        active.iter().map(|(s, w, f)| (*s, w * f.rate_at_gain(g_lo))).collect();
    let total: f64 = parts.iter().map(|(_, x)| x).sum();
    if total > rate && total > 0.0 {
        let scale = rate / total;
        for (_, x) in parts.iter_mut() {
            *x *= scale;
        }
    }
    allocation_from(&parts)
}

/// Minimum achievable distortion of a profile with unlimited rate.
pub fn dmin_profile(decomp: &FractionDecomposition) -> f64 {
    let w = &decomp.weights;
    w.only1 * decomp.only1.d_min()
        + w.overlap * decomp.overlap.d_min()
        + w.only2 * decomp.only2.d_min()
        + w.none * decomp.d_max
}

/// Minimum total rate reaching profile distortion `distortion`, with the
/// weighted distortion split at that rate.
pub fn rate_distortion_profile(
    decomp: &FractionDecomposition,
    distortion: f64,
) -> Result<(f64, DistortionAllocation)> {
    let floor = dmin_profile(decomp);
    if distortion < floor - 1e-12 {
        return Err(Error::InfeasibleDistortion { requested: distortion, floor });
    }
    let (d0, a0) = distortion_rate_profile(decomp, 0.0)?;
    if distortion >= d0 {
        return Ok((0.0, decomp.distortion_split(&a0)));
    }
    let target = distortion + 1e-13 * distortion.abs().max(1.0);
    let dr = |r: f64| distortion_rate_profile(decomp, r).map(|(d, _)| d).unwrap_or(f64::INFINITY);
    let mut hi = 1.0;
    while dr(hi) > target {
        hi *= 2.0;
        if hi > 4096.0 {
            let (_, a) = distortion_rate_profile(decomp, hi)?;
            return Ok((f64::INFINITY, decomp.distortion_split(&a)));
        }
    }
    let r = bisect_nonincreasing(dr, 0.0, hi, target, 1e-9);
    let r = r + 1e-9;
    let (_, alloc) = distortion_rate_profile(decomp, r)?;
    Ok((r, decomp.distortion_split(&alloc)))
}

/// Budget-level minimum distortion and the minimizing overlap, from the
/// per-fraction floors. Ties resolve to the smallest overlap.
pub fn dmin_budget(budget: &SamplingBudget, d1_min: f64, d2_min: f64, d_max: f64) -> (f64, f64) {
    let (lo, hi) = budget.theta12_bounds();
    let theta12 = if d_max < d1_min + d2_min - 1e-12 { hi } else { lo };
    let (t1, t2) = (budget.theta1(), budget.theta2());
    let value = (t1 - theta12) * d1_min + (t2 - theta12) * d2_min + (1.0 + theta12 - t1 - t2) * d_max;
    (value, theta12)
}

/// Best distortion over admissible overlaps at a given link rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapOptimum {
    pub distortion: f64,
    pub theta12: f64,
}

/// Minimizes the profile distortion over `theta12` by a uniform grid plus
/// golden-section refinement; ties resolve to the smallest overlap.
pub fn optimize_overlap<F>(budget: &SamplingBudget, rate: f64, decomp_builder: F) -> Result<OverlapOptimum>
where
    F: Fn(f64) -> FractionDecomposition,
{
    ensure(rate >= 0.0, || format!("rate {rate} is negative"))?;
    let (lo, hi) = budget.theta12_bounds();
    let objective = |t: f64| {
        distortion_rate_profile(&decomp_builder(t.clamp(lo, hi)), rate)
            .map(|(d, _)| d)
            .unwrap_or(f64::INFINITY)
    };
    let (theta12, distortion) = grid_golden_min(objective, lo, hi, OVERLAP_GRID_POINTS, OVERLAP_TOL);
    Ok(OverlapOptimum { distortion, theta12: theta12.clamp(lo, hi) })
}

/// Decomposition builder over `theta12` for a fixed budget and computation.
pub fn builder_for(computation: Computation, budget: SamplingBudget) -> impl Fn(f64) -> FractionDecomposition {
    move |t| {
        let (lo, hi) = budget.theta12_bounds();
        let profile = budget.profile(t.clamp(lo, hi)).expect("clamped overlap is admissible");
        FractionDecomposition::for_computation(&computation, &profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{binary_entropy, DsbsModel, GaussianPair};
    use approx::assert_abs_diff_eq;

    fn gauss_sum(rho: f64, t: (f64, f64, f64)) -> FractionDecomposition {
        let p = SamplingProfile::from_triple(t.0, t.1, t.2).unwrap();
        FractionDecomposition::for_computation(&Computation::GaussianSum(GaussianPair::new(rho).unwrap()), &p)
    }

    fn gauss_id(rho: f64, t: (f64, f64, f64)) -> FractionDecomposition {
        let p = SamplingProfile::from_triple(t.0, t.1, t.2).unwrap();
        FractionDecomposition::for_computation(&Computation::GaussianIdentity(GaussianPair::new(rho).unwrap()), &p)
    }

    fn binary(c: Computation, t: (f64, f64, f64)) -> FractionDecomposition {
        let p = SamplingProfile::from_triple(t.0, t.1, t.2).unwrap();
        FractionDecomposition::for_computation(&c, &p)
    }

    /// Brute-force allocation on the simplex `r1 + r2 + r12 = rate`.
    fn simplex_brute(d: &FractionDecomposition, rate: f64, n: usize) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..=n {
            for j in 0..=(n - i) {
                let r1 = rate * i as f64 / n as f64;
                let r2 = rate * j as f64 / n as f64;
                let a = RateAllocation { r1, r2, r12: (rate - r1 - r2).max(0.0) };
                best = best.min(d.evaluate(&a));
            }
        }
        best
    }

    #[test]
    fn zero_rate_is_weighted_dmax() {
        let d = gauss_sum(0.5, (0.5, 0.75, 0.25));
        let (v, a) = distortion_rate_profile(&d, 0.0).unwrap();
        assert_eq!(a.total(), 0.0);
        let w = d.weights;
        let expected = w.only1 * d.only1.d_max() + w.overlap * d.overlap.d_max() + w.only2 * d.only2.d_max() + w.none * d.d_max;
        assert_abs_diff_eq!(v, expected, epsilon = 1e-12);
        assert!(distortion_rate_profile(&d, -0.1).is_err());
    }

    #[test]
    fn identity_small_rate_branch() {
        let d = gauss_id(0.5, (0.5, 0.75, 0.25));
        let (v, _) = distortion_rate_profile(&d, 0.25).unwrap();
        let closed = 1.0 - 0.5 + 0.5 * (-2.0 * 0.25 / 0.5_f64).exp2();
        assert_abs_diff_eq!(v, 0.75, epsilon = 1e-9);
        assert_abs_diff_eq!(v, closed, epsilon = 1e-9);
        // 3-variable allocation grid with step ~1e-3 of the rate
        let brute = simplex_brute(&d, 0.25, 250);
        assert!((v - brute).abs() < 1e-4 && v <= brute + 1e-12);
    }

    #[test]
    fn full_source1_reduces_to_standard_gaussian() {
        let d = gauss_id(0.3, (1.0, 0.0, 0.0));
        let (v, _) = distortion_rate_profile(&d, 1.0).unwrap();
        assert_abs_diff_eq!(v, 0.25, epsilon = 1e-10);
    }

    #[test]
    fn rate_distortion_examples() {
        let d = gauss_sum(0.5, (0.5, 0.75, 0.25));
        let (r, _) = rate_distortion_profile(&d, 3.0).unwrap();
        assert_eq!(r, 0.0);

        let d = gauss_sum(0.0, (1.0, 1.0, 1.0));
        let (r, split) = rate_distortion_profile(&d, 0.5).unwrap();
        assert_abs_diff_eq!(r, 0.5 * (2.0_f64 / 0.5).log2(), epsilon = 1e-6);
        assert_abs_diff_eq!(split.d12, 0.5, epsilon = 1e-6);

        let floor = dmin_profile(&gauss_sum(0.5, (0.5, 0.75, 0.25)));
        assert!(matches!(
            rate_distortion_profile(&gauss_sum(0.5, (0.5, 0.75, 0.25)), floor - 0.01),
            Err(Error::InfeasibleDistortion { .. })
        ));
    }

    #[test]
    fn xor_profile_rate_matches_weighted_closed_form() {
        let xor = Computation::BinaryXor(DsbsModel::new(0.2).unwrap());
        let d = binary(xor, (0.5, 0.75, 0.5));
        let (r, split) = rate_distortion_profile(&d, 0.15).unwrap();
        // only the overlap helps: 0.5 (h(0.2) - h(0.1))
        let expected = 0.5 * (binary_entropy(0.2).unwrap() - binary_entropy(0.1).unwrap());
        assert_abs_diff_eq!(r, expected, epsilon = 1e-6);
        assert_abs_diff_eq!(split.d12, 0.05, epsilon = 1e-6);
        // round trip
        let (back, _) = distortion_rate_profile(&d, r).unwrap();
        assert_abs_diff_eq!(back, 0.15, epsilon = 1e-6);
    }

    #[test]
    fn dmin_profile_examples() {
        let and = Computation::BinaryAnd(DsbsModel::new(0.1).unwrap());
        assert_abs_diff_eq!(dmin_profile(&binary(and, (0.5, 0.75, 0.25))), 0.0375, epsilon = 1e-12);
        assert_abs_diff_eq!(0.25 * 0.05 + 0.5 * 0.05 + 0.0 * 0.45, 0.0375, epsilon = 1e-15);
        assert_eq!(dmin_profile(&gauss_sum(0.3, (1.0, 1.0, 1.0))), 0.0);
        let d = gauss_sum(0.3, (0.0, 0.0, 0.0));
        assert_eq!(dmin_profile(&d), d.d_max);
    }

    #[test]
    fn dmin_budget_examples() {
        let b = SamplingBudget::new(0.5, 0.75).unwrap();
        // Gaussian sum, rho = 0.5: floors 2(1+rho)(1-rho_tilde^2) = 0.75
        let (v, t) = dmin_budget(&b, 0.75, 0.75, 3.0);
        assert_abs_diff_eq!(v, 0.5625, epsilon = 1e-12);
        assert_eq!(t, 0.25);
        let sweep = (0..=100)
            .map(|i| {
                let t12 = 0.25 + 0.25 * i as f64 / 100.0;
                dmin_profile(&gauss_sum(0.5, (0.5, 0.75, t12)))
            })
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(v, sweep, epsilon = 1e-12);

        let full = SamplingBudget::new(1.0, 1.0).unwrap();
        assert_eq!(dmin_budget(&full, 0.75, 0.75, 3.0), (0.0, 1.0));

        // binary AND, p = 0.4: floors p/2 = 0.2, Dmax = 0.3
        let (v, t) = dmin_budget(&b, 0.2, 0.2, 0.3);
        assert_abs_diff_eq!(v, 0.125, epsilon = 1e-12);
        assert_eq!(t, 0.5);
        // exact tie goes to the minimum overlap
        assert_eq!(dmin_budget(&b, 0.15, 0.15, 0.3).1, 0.25);
    }

    #[test]
    fn overlap_examples() {
        let b = SamplingBudget::new(0.5, 0.75).unwrap();
        let sum = |rho: f64| builder_for(Computation::GaussianSum(GaussianPair::new(rho).unwrap()), b);
        for r in [0.1, 0.5, 1.0, 2.0] {
            assert_eq!(optimize_overlap(&b, r, sum(-0.5)).unwrap().theta12, 0.5);
        }
        assert_eq!(optimize_overlap(&b, 0.04, sum(0.5)).unwrap().theta12, 0.5);
        assert_eq!(optimize_overlap(&b, 1.0, sum(0.5)).unwrap().theta12, 0.25);
    }

    #[test]
    fn matches_simplex_brute_force_on_random_instances() {
        let mut state = 0x9e37_79b9_7f4a_7c15_u64;
        let mut uniform = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for k in 0..20 {
            let t1 = uniform();
            let t2 = uniform();
            let b = SamplingBudget::new(t1, t2).unwrap();
            let (lo, hi) = b.theta12_bounds();
            let t12 = lo + (hi - lo) * uniform();
            let rho = -0.9 + 1.8 * uniform();
            let rate = 1.5 * uniform();
            let d = if k % 2 == 0 { gauss_sum(rho, (t1, t2, t12)) } else { gauss_id(rho, (t1, t2, t12)) };
            let (v, a) = distortion_rate_profile(&d, rate).unwrap();
            assert!(a.total() <= rate + 1e-12);
            let brute = simplex_brute(&d, rate, 300);
            assert!(v <= brute + 1e-12, "closed form worse than brute force");
            assert!(brute - v < 1e-4, "instance {k}: {v} vs {brute}");
        }
    }

    #[test]
    fn water_filling_equalizes_marginal_gains() {
        let d = gauss_sum(0.3, (0.6, 0.7, 0.45));
        let (_, a) = distortion_rate_profile(&d, 2.0).unwrap();
        let w = d.weights;
        let gain = |f: &FractionRd, r: f64| {
            let h = 1e-6;
            -(f.distortion(r + h) - f.distortion(r - h)) / (2.0 * h)
        };
        let g1 = gain(&d.only1, a.r1 / w.only1);
        let g12 = gain(&d.overlap, a.r12 / w.overlap);
        let g2 = gain(&d.only2, a.r2 / w.only2);
        assert!(a.r1 > 0.0 && a.r2 > 0.0 && a.r12 > 0.0);
        assert!((g1 - g12).abs() < 1e-5 && (g2 - g12).abs() < 1e-5, "{g1} {g12} {g2}");
    }

    #[test]
    fn profile_curve_is_convex_nonincreasing_and_invertible() {
        let d = gauss_sum(0.5, (0.5, 0.75, 0.3));
        let values: Vec<f64> = (0..100).map(|i| distortion_rate_profile(&d, 2.0 * i as f64 / 99.0).unwrap().0).collect();
        assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(values.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] >= -1e-8));
        for r in [0.05, 0.4, 1.3] {
            let (dist, _) = distortion_rate_profile(&d, r).unwrap();
            let (back, _) = rate_distortion_profile(&d, dist).unwrap();
            assert_abs_diff_eq!(back, r, epsilon = 1e-6);
        }
    }

    #[test]
    fn and_decomposition_matches_simplex_search() {
        let and = Computation::BinaryAnd(DsbsModel::new(0.2).unwrap());
        let d = binary(and, (0.5, 0.75, 0.3));
        for rate in [0.1, 0.5, 0.9] {
            let (v, a) = distortion_rate_profile(&d, rate).unwrap();
            let brute = simplex_brute(&d, rate, 60);
            assert!(v <= brute + 1e-9 && brute - v < 1e-3, "{v} vs {brute}");
            assert!((a.total() - rate).abs() < 1e-9);
        }
        // past saturation every fraction sits at its floor
        let (v, _) = distortion_rate_profile(&d, 3.0).unwrap();
        assert_abs_diff_eq!(v, dmin_profile(&d), epsilon = 1e-12);
    }
}
