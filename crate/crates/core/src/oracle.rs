//! Brute-force grid minimizers, shape checks and validation suites.
//!
//! Everything the suites compare against is written out again here from
//! the defining optimization problems: the objectives, the binary entropy,
//! and the grid search. Nothing in this module reuses the solvers it checks.

use crate::binary::{and_dmin, and_rd, xor_rd};
use crate::combiner::builder_for;
use crate::error::{Error, Result};
use crate::gaussian::{identity_dr, sum_dmin, sum_dr, sum_dr_nonpos_rho, sum_dr_smallrate};
use crate::model::{Computation, GaussianPair, SamplingBudget};
use crate::multihop::{multihop_upper_bound, sideinfo_lower_bound, MultiHopRates};
use crate::primitives::binary_and_indirect_rd;
use crate::scenario::Scenario;
use crate::worstcase::{dmu_budget, dmu_profile, mu_threshold};

/// Box, resolution and refinement depth of a grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    bounds: Vec<(f64, f64)>,
    points: Vec<usize>,
    depth: usize,
}

impl GridSpec {
    pub fn new(bounds: Vec<(f64, f64)>, points: Vec<usize>, depth: usize) -> Result<Self> {
        if bounds.is_empty() || bounds.len() > 3 || bounds.len() != points.len() {
            return Err(Error::Domain(format!(
                "grid needs 1 to 3 dimensions with one point count each, got {} bounds and {} counts",
                bounds.len(),
                points.len()
            )));
        }
        if let Some(n) = points.iter().find(|n| **n < 3) {
            return Err(Error::Domain(format!("grid point count {n} is below 3")));
        }
        if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::Domain(format!("grid bounds [{lo}, {hi}] are not ordered")));
        }
        Ok(Self { bounds, points, depth })
    }

    /// 101 points per axis in one or two dimensions, 51 in three, depth 4.
    pub fn with_defaults(bounds: Vec<(f64, f64)>) -> Result<Self> {
        let n = if bounds.len() >= 3 { 51 } else { 101 };
        let points = vec![n; bounds.len()];
        Self::new(bounds, points, 4)
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }
}

const ORACLE_TIE: f64 = 1e-12;

fn beats(v: f64, best: Option<f64>) -> bool {
    match best {
        None => true,
        Some(b) => v < b - ORACLE_TIE * b.abs().max(1.0),
    }
}

/// Exhaustive grid search followed by repeated zooming (by a factor of ten
/// per level) around the incumbent. `objective` returns `None` at
/// infeasible points. Ties keep the lexicographically smallest point.
pub fn grid_minimize<F>(objective: F, spec: &GridSpec) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let k = spec.dims();
    let mut bounds = spec.bounds.clone();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _level in 0..=spec.depth {
        let mut idx = vec![0usize; k];
        let mut x = vec![0.0; k];
        let mut level_best = best.clone();
        loop {
            for d in 0..k {
                let (lo, hi) = bounds[d];
                let n = spec.points[d];
                x[d] = if idx[d] + 1 == n { hi } else { lo + (hi - lo) * idx[d] as f64 / (n - 1) as f64 };
            }
            if let Some(v) = objective(&x).filter(|v| v.is_finite()) {
                let better = match &level_best {
                    None => true,
                    Some((b, bx)) => beats(v, Some(*b)) || ((v - b).abs() <= ORACLE_TIE * b.abs().max(1.0) && x < *bx),
                };
                if better {
                    level_best = Some((v, x.clone()));
                }
            }
            // odometer, last axis fastest
            let mut d = k;
            loop {
                if d == 0 {
                    break;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < spec.points[d] {
                    break;
                }
                idx[d] = 0;
                if d == 0 {
                    d = usize::MAX;
                    break;
                }
            }
            if d == usize::MAX {
                break;
            }
        }
        best = level_best;
        let Some((_, center)) = &best else {
            return Err(Error::NoFeasiblePoint);
        };
        for d in 0..k {
            let (lo0, hi0) = spec.bounds[d];
            let half = (bounds[d].1 - bounds[d].0) / 20.0;
            bounds[d] = ((center[d] - half).max(lo0), (center[d] + half).min(hi0));
        }
    }
    best.ok_or(Error::NoFeasiblePoint)
}

/// Outcome of a shape check.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeCheck {
    Pass,
    /// The first offending consecutive samples.
    Violation(Vec<(f64, f64)>),
}

impl ShapeCheck {
    pub fn passed(&self) -> bool {
        matches!(self, ShapeCheck::Pass)
    }
}

fn check_samples(samples: &[(f64, f64)], min_len: usize) -> Result<()> {
    if samples.len() < min_len {
        return Err(Error::Domain(format!("need at least {min_len} samples, got {}", samples.len())));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Domain("sample abscissae must be strictly increasing".into()));
    }
    Ok(())
}

/// Checks convexity on every consecutive triple with slack `1e-8`.
pub fn check_convexity(samples: &[(f64, f64)]) -> Result<ShapeCheck> {
    check_samples(samples, 3)?;
    for w in samples.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let lambda = (c.0 - b.0) / (c.0 - a.0);
        if b.1 > lambda * a.1 + (1.0 - lambda) * c.1 + 1e-8 {
            return Ok(ShapeCheck::Violation(w.to_vec()));
        }
    }
    Ok(ShapeCheck::Pass)
}

/// Checks that samples are nonincreasing with slack `1e-9`.
pub fn check_monotone(samples: &[(f64, f64)]) -> Result<ShapeCheck> {
    check_samples(samples, 2)?;
    for w in samples.windows(2) {
        if w[1].1 > w[0].1 + 1e-9 {
            return Ok(ShapeCheck::Violation(w.to_vec()));
        }
    }
    Ok(ShapeCheck::Pass)
}

/// Independent objectives, written directly from their definitions.
pub mod objectives {
    /// Binary entropy in bits.
    pub fn h(x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
        }
    }

    fn exp_term(weight: f64, amp: f64, rate: f64) -> f64 {
        if weight <= 0.0 {
            0.0
        } else {
            weight * amp * 2f64.powf(-2.0 * rate / weight)
        }
    }

    fn overlap_range(t1: f64, t2: f64) -> (f64, f64) {
        ((t1 + t2 - 1.0).max(0.0), t1.min(t2))
    }

    /// `T = S1`: per-fraction rates `r1` (only `S1`), `r2` (only `S2`), the
    /// rest of `rate` to the overlap.
    pub fn identity(t1: f64, t2: f64, rho: f64, rate: f64, t12: f64, r1: f64, r2: f64) -> Option<f64> {
        let r12 = rate - r1 - r2;
        if r12 < -1e-12 {
            return None;
        }
        let none = 1.0 + t12 - t1 - t2;
        let only2 = t2 - t12;
        let rho2 = rho * rho;
        Some(
            exp_term(t1 - t12, 1.0, r1)
                + exp_term(t12, 1.0, r12.max(0.0))
                + only2 * (1.0 - rho2)
                + exp_term(only2, rho2, r2)
                + none,
        )
    }

    /// `T = S1 + S2` with both single-source fractions merged.
    pub fn gaussian_sum(t1: f64, t2: f64, rho: f64, rate: f64, t12: f64, r12: f64) -> Option<f64> {
        if r12 > rate + 1e-12 {
            return None;
        }
        let var = 2.0 * (1.0 + rho);
        let w = t1 + t2 - 2.0 * t12;
        let none = 1.0 + t12 - t1 - t2;
        let share = (1.0 + rho) / 2.0;
        Some(
            exp_term(t12, var, r12)
                + w * var * (1.0 - share)
                + exp_term(w, var * share, (rate - r12).max(0.0))
                + none * var,
        )
    }

    /// Unlimited-rate distortion of `T = S1 + S2` at overlap `t12`.
    pub fn gaussian_sum_floor(t1: f64, t2: f64, rho: f64, t12: f64) -> f64 {
        let var = 2.0 * (1.0 + rho);
        (t1 + t2 - 2.0 * t12) * var * (1.0 - rho) / 2.0 + (1.0 + t12 - t1 - t2) * var
    }

    /// Rate of `T = S1 xor S2` at overlap `t12` and target `d`: single
    /// sources carry no information, so the overlap alone must bring the
    /// distortion from `p` down.
    pub fn xor_rate(t1: f64, t2: f64, p: f64, d: f64, t12: f64) -> Option<f64> {
        let (lo, hi) = overlap_range(t1, t2);
        if t12 < lo - 1e-12 || t12 > hi + 1e-12 {
            return None;
        }
        if d >= p {
            return Some(0.0);
        }
        let d12 = d - (1.0 - t12) * p;
        if d12 < -1e-12 || t12 <= 0.0 {
            return None;
        }
        Some(t12 * (h(p) - h((d12 / t12).max(0.0))))
    }

    /// Inner objective of the AND indirect rate-distortion function.
    pub fn and_indirect(p: f64, d: f64, y: f64) -> f64 {
        h(d + y * (1.0 - p) + (p - 1.0) / 2.0) - 0.5 * h(y) - 0.5 * h(2.0 * d + y * (1.0 - 2.0 * p) + p - 1.0)
    }

    /// Total rate for `T = S1 and S2` at overlap `t12` with weighted overlap
    /// distortion `d12`; `r1` is the single-source indirect function.
    pub fn and_rate(t1: f64, t2: f64, p: f64, d: f64, t12: f64, d12: f64, r1: impl Fn(f64) -> f64) -> Option<f64> {
        let w3 = t1 + t2 - 2.0 * t12;
        let none = 1.0 + t12 - t1 - t2;
        let d3 = d - d12 - (1.0 - p) / 2.0 * none;
        let slack = 1e-12;
        if d12 < -slack || d12 > (1.0 - p) * t12 / 2.0 + slack {
            return None;
        }
        if d3 < p * w3 / 2.0 - slack || d3 > (1.0 - p) * w3 / 2.0 + slack {
            return None;
        }
        let overlap = if t12 > 0.0 { t12 * (h((1.0 - p) / 2.0) - h((d12 / t12).clamp(0.0, 0.5))).max(0.0) } else { 0.0 };
        let single = if w3 > 0.0 { w3 * r1((d3 / w3).max(p / 2.0)) } else { 0.0 };
        Some(overlap + single)
    }

    /// Side-information objective: `r11` describes the `S1`-only samples,
    /// the rest of `r1` the overlap, decoded with `S2` as side information.
    pub fn sideinfo(t1: f64, t2: f64, rho: f64, r1: f64, t12: f64, r11: f64) -> Option<f64> {
        if r11 > r1 + 1e-12 {
            return None;
        }
        let only1 = t1 - t12;
        let only2 = t2 - t12;
        let none = 1.0 + t12 - t1 - t2;
        let var = 2.0 * (1.0 + rho);
        let share = (1.0 + rho) / 2.0;
        Some(
            exp_term(t12, 1.0 - rho * rho, (r1 - r11).max(0.0))
                + only1 * var * (1.0 - share)
                + exp_term(only1, var * share, r11)
                + only2 * (1.0 - rho * rho)
                + none * var,
        )
    }

    /// Re-compress scheme distortion on the overlap.
    pub fn d0(a: f64, b: f64, rho: f64) -> f64 {
        (1.0 - rho * rho) * (1.0 - 2f64.powf(-2.0 * b)) * 2f64.powf(-2.0 * a) + 2.0 * (1.0 + rho) * 2f64.powf(-2.0 * b)
    }

    /// Two-hop achievable distortion with the `S1`-only samples forwarded,
    /// the overlap re-compressed and the `S2`-only samples described at the
    /// relay.
    pub fn multihop(t1: f64, t2: f64, rho: f64, r1: f64, r2: f64, t12: f64, r11: f64, r22: f64) -> Option<f64> {
        let r23 = r2 - r11 - r22;
        if r11 > r1 + 1e-12 || r23 < -1e-12 {
            return None;
        }
        let only1 = t1 - t12;
        let only2 = t2 - t12;
        let none = 1.0 + t12 - t1 - t2;
        let var = 2.0 * (1.0 + rho);
        let share = (1.0 + rho) / 2.0;
        let overlap = if t12 > 0.0 { t12 * d0((r1 - r11).max(0.0) / t12, r22 / t12, rho) } else { 0.0 };
        Some(
            only1 * var * (1.0 - share)
                + exp_term(only1, var * share, r11)
                + overlap
                + only2 * var * (1.0 - share)
                + exp_term(only2, var * share, r23.max(0.0))
                + none * var,
        )
    }

    /// Average plus weighted worst distortion for `T = S1 + S2` at the
    /// minimal overlap of a budget covering every sample.
    pub fn worstcase_boundary(t1: f64, t2: f64, rho: f64, rate: f64, mu: f64, r12: f64) -> Option<f64> {
        if r12 > rate + 1e-12 {
            return None;
        }
        let var = 2.0 * (1.0 + rho);
        let share = (1.0 + rho) / 2.0;
        let excl = 2.0 - t1 - t2;
        let ov = t1 + t2 - 1.0;
        let d_excl = if excl > 0.0 { var * (1.0 - share + share * 2f64.powf(-2.0 * (rate - r12).max(0.0) / excl)) } else { 0.0 };
        let d_ov = if ov > 0.0 { var * 2f64.powf(-2.0 * r12 / ov) } else { 0.0 };
        Some(excl * d_excl + ov * d_ov + mu * d_excl.max(d_ov))
    }
}

/// What a check compares the solver against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// A brute-force grid minimum of the independent objective.
    Oracle,
    /// A published reference value.
    Anchor,
}

/// One solver value against its reference.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub kind: CheckKind,
    pub solver: f64,
    /// Reference value: the oracle minimum or the anchor.
    pub oracle: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn deviation(&self) -> f64 {
        (self.solver - self.oracle).abs()
    }

    pub fn passed(&self) -> bool {
        self.deviation() <= self.tolerance
    }
}

/// All checks of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub scenario: Scenario,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    /// Largest deviation from an oracle, ignoring anchor checks.
    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().filter(|c| c.kind == CheckKind::Oracle).map(CheckResult::deviation).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

const BUDGET: (f64, f64) = (0.5, 0.75);
/// Tolerance for one- and two-dimensional oracle problems.
pub const TOL_LOW_DIM: f64 = 1e-4;
/// Tolerance for three-dimensional and nested oracle problems.
pub const TOL_HIGH_DIM: f64 = 1e-3;

fn overlap_bounds(t1: f64, t2: f64) -> (f64, f64) {
    ((t1 + t2 - 1.0).max(0.0), t1.min(t2))
}

fn push(checks: &mut Vec<CheckResult>, name: String, solver: f64, oracle: f64, tolerance: f64) {
    checks.push(CheckResult { name, kind: CheckKind::Oracle, solver, oracle, tolerance });
}

fn push_anchor(checks: &mut Vec<CheckResult>, name: String, solver: f64, anchor: f64, tolerance: f64) {
    checks.push(CheckResult { name, kind: CheckKind::Anchor, solver, oracle: anchor, tolerance });
}

/// Runs the oracle suite of one scenario on its fixed instance set.
pub fn validate(scenario: Scenario) -> Result<ValidationReport> {
    let checks = match scenario {
        Scenario::GaussianIdentity => validate_identity()?,
        Scenario::GaussianSum => validate_sum()?,
        Scenario::BinaryXor => validate_xor()?,
        Scenario::BinaryAnd => validate_and()?,
        Scenario::Multihop => validate_multihop()?,
        Scenario::Worstcase => validate_worstcase()?,
    };
    Ok(ValidationReport { scenario, checks })
}

fn validate_identity() -> Result<Vec<CheckResult>> {
    let (t1, t2) = BUDGET;
    let b = SamplingBudget::new(t1, t2)?;
    let (lo, hi) = overlap_bounds(t1, t2);
    let mut out = Vec::new();
    for rho in [-0.5, 0.5, 0.9] {
        for rate in [0.1, 0.25, 0.6, 1.0] {
            let spec = GridSpec::with_defaults(vec![(lo, hi), (0.0, rate), (0.0, rate)])?;
            let (oracle, _) = grid_minimize(|x| objectives::identity(t1, t2, rho, rate, x[0], x[1], x[2]), &spec)?;
            let solver = identity_dr(&b, rho, rate)?.distortion;
            push(&mut out, format!("identity rho={rho} R={rate}"), solver, oracle, TOL_HIGH_DIM);
        }
    }
    Ok(out)
}

fn validate_sum() -> Result<Vec<CheckResult>> {
    let (t1, t2) = BUDGET;
    let b = SamplingBudget::new(t1, t2)?;
    let (lo, hi) = overlap_bounds(t1, t2);
    let mut out = Vec::new();
    for rho in [-0.5, 0.0, 0.5, 0.8] {
        for rate in [0.04, 0.25, 0.6, 1.0] {
            let spec = GridSpec::with_defaults(vec![(lo, hi), (0.0, rate)])?;
            let (oracle, _) = grid_minimize(|x| objectives::gaussian_sum(t1, t2, rho, rate, x[0], x[1]), &spec)?;
            push(&mut out, format!("sum rho={rho} R={rate}"), sum_dr(&b, rho, rate)?.distortion, oracle, TOL_LOW_DIM);
            if rho <= 0.0 {
                let closed = sum_dr_nonpos_rho(&b, rho, rate)?.0;
                push(&mut out, format!("sum nonpositive rho={rho} R={rate}"), closed, oracle, TOL_LOW_DIM);
            } else if let Ok(closed) = sum_dr_smallrate(&b, rho, rate) {
                push(&mut out, format!("sum small-rate rho={rho} R={rate}"), closed, oracle, TOL_LOW_DIM);
            }
        }
        let spec = GridSpec::with_defaults(vec![(lo, hi)])?;
        let (oracle, _) = grid_minimize(|x| Some(objectives::gaussian_sum_floor(t1, t2, rho, x[0])), &spec)?;
        push(&mut out, format!("sum floor rho={rho}"), sum_dmin(&b, rho)?.0, oracle, TOL_LOW_DIM);
    }
    Ok(out)
}

fn validate_xor() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for (t1, t2) in [BUDGET, (0.3, 0.9), (0.8, 0.8)] {
        let b = SamplingBudget::new(t1, t2)?;
        let (lo, hi) = overlap_bounds(t1, t2);
        for p in [0.1, 0.2, 0.3] {
            let floor = (1.0 - hi) * p;
            for frac in [0.0, 0.3, 0.7, 0.95] {
                let d = floor + frac * (p - floor);
                let spec = GridSpec::with_defaults(vec![(lo, hi)])?;
                let (oracle, _) = grid_minimize(|x| objectives::xor_rate(t1, t2, p, d, x[0]), &spec)?;
                let solver = xor_rd(&b, p, d)?.0;
                push(&mut out, format!("xor ({t1},{t2}) p={p} D={d:.4}"), solver, oracle, TOL_LOW_DIM);
            }
        }
    }
    Ok(out)
}

/// Indirect AND rate by a one-dimensional grid over the test channel.
fn and_indirect_oracle(p: f64, d: f64) -> f64 {
    if d >= (1.0 - p) / 2.0 {
        return 0.0;
    }
    let lo = ((1.0 - p - 2.0 * d) / (1.0 - 2.0 * p)).clamp(0.0, 1.0);
    let spec = GridSpec { bounds: vec![(lo, 1.0)], points: vec![101], depth: 4 };
    grid_minimize(|y| Some(objectives::and_indirect(p, d, y[0])), &spec).map_or(f64::INFINITY, |(v, _)| v.max(0.0))
}

fn validate_and() -> Result<Vec<CheckResult>> {
    let (t1, t2) = BUDGET;
    let b = SamplingBudget::new(t1, t2)?;
    let (lo, hi) = overlap_bounds(t1, t2);
    let mut out = Vec::new();
    for (p, d) in [(0.2, 0.3), (0.1, 0.2), (0.3, 0.2), (0.4, 0.25), (0.05, 0.1)] {
        let solver = binary_and_indirect_rd(p, d)?;
        push(&mut out, format!("and indirect p={p} D={d}"), solver, and_indirect_oracle(p, d), TOL_LOW_DIM);
    }
    for p in [0.1, 0.2, 0.4] {
        let floor = and_dmin(&b, p)?;
        let spec = GridSpec::with_defaults(vec![(lo, hi)])?;
        let dmin = |t12: f64| (t1 + t2 - 2.0 * t12) * p / 2.0 + (1.0 + t12 - t1 - t2) * (1.0 - p) / 2.0;
        let (oracle, _) = grid_minimize(|x| Some(dmin(x[0])), &spec)?;
        push(&mut out, format!("and floor p={p}"), floor.distortion, oracle, TOL_LOW_DIM);
        for frac in [0.0, 0.25, 0.6] {
            let d = floor.distortion + frac * ((1.0 - p) / 2.0 - floor.distortion);
            let spec = GridSpec::with_defaults(vec![(lo, hi), (0.0, (1.0 - p) * hi / 2.0)])?;
            let (oracle, _) = grid_minimize(
                |x| objectives::and_rate(t1, t2, p, d, x[0], x[1], |dd| and_indirect_oracle(p, dd)),
                &GridSpec { depth: 3, ..spec },
            )?;
            let solver = and_rd(&b, p, d)?.rate;
            push(&mut out, format!("and rate p={p} D={d:.4}"), solver, oracle, TOL_HIGH_DIM);
        }
    }
    Ok(out)
}

fn validate_multihop() -> Result<Vec<CheckResult>> {
    let (t1, t2) = BUDGET;
    let b = SamplingBudget::new(t1, t2)?;
    let (lo, hi) = overlap_bounds(t1, t2);
    let mut out = Vec::new();
    for rho in [-0.5, 0.5] {
        for r1 in [0.0, 0.1, 0.3, 1.0] {
            let spec = GridSpec::with_defaults(vec![(lo, hi), (0.0, r1)])?;
            let (oracle, _) = grid_minimize(|x| objectives::sideinfo(t1, t2, rho, r1, x[0], x[1]), &spec)?;
            let solver = sideinfo_lower_bound(r1, &b, rho)?.distortion;
            push(&mut out, format!("side-information rho={rho} R1={r1}"), solver, oracle, TOL_LOW_DIM);
        }
    }
    for (r1, r2) in [(0.3_f64, 0.02), (0.3, 0.1), (0.3, 0.2), (0.3, 0.5), (0.6, 0.4)] {
        let spec = GridSpec::with_defaults(vec![(lo, hi), (0.0, r1.min(r2)), (0.0, r2)])?;
        let (oracle, _) = grid_minimize(|x| objectives::multihop(t1, t2, 0.5, r1, r2, x[0], x[1], x[2]), &spec)?;
        let solver = multihop_upper_bound(MultiHopRates::new(r1, r2)?, &b, 0.5)?.distortion;
        push(&mut out, format!("re-compress R1={r1} R2={r2}"), solver, oracle, TOL_HIGH_DIM);
    }
    Ok(out)
}

/// Transition weights of the worst-case trade-off at budget (0.5, 0.75),
/// `rho = 0.5`, for link rates 0.3 and 0.6.
pub const MU_ANCHORS: [(f64, f64); 2] = [(0.3, 0.069), (0.6, 0.004)];

fn validate_worstcase() -> Result<Vec<CheckResult>> {
    let (t1, t2) = BUDGET;
    let rho = 0.5;
    let b = SamplingBudget::new(t1, t2)?;
    let comp = Computation::GaussianSum(GaussianPair::new(rho)?);
    let build = builder_for(comp, b);
    let (lo, _) = overlap_bounds(t1, t2);
    let mut out = Vec::new();
    for rate in [0.3, 0.6, 1.0] {
        for mu in [0.05, 0.5, 10.0] {
            let spec = GridSpec::with_defaults(vec![(0.0, rate)])?;
            let (oracle, _) = grid_minimize(|x| objectives::worstcase_boundary(t1, t2, rho, rate, mu, x[0]), &spec)?;
            let (solver, _) = dmu_profile(&build(lo), rate, mu)?;
            push(&mut out, format!("worst-case boundary R={rate} mu={mu}"), solver, oracle, TOL_LOW_DIM);
        }
    }
    for (rate, anchor) in MU_ANCHORS {
        let mu = mu_threshold(&b, rate, &build)?.unwrap_or(f64::INFINITY);
        push_anchor(&mut out, format!("transition weight R={rate}"), mu, anchor, 0.005);
    }
    let t = dmu_budget(&b, 0.6, 0.002, &build)?.theta12_star;
    push_anchor(&mut out, "overlap R=0.6 mu=0.002".into(), t, 0.42, 0.02);
    Ok(out)
}
