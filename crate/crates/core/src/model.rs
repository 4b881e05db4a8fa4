//! Sampling budgets and profiles, source models, and binary-entropy helpers.
//!
//! A *sampling budget* `(theta1, theta2)` fixes the fraction of samples the
//! encoder may measure from each source. A *sampling profile* adds the
//! overlap `theta12`, the fraction of time instants at which both sources
//! are measured. The profile splits the block into four fractions:
//!
//! | fraction        | weight                         |
//! |-----------------|--------------------------------|
//! | only source 1   | `theta1 - theta12`             |
//! | both sources    | `theta12`                      |
//! | only source 2   | `theta2 - theta12`             |
//! | neither         | `1 + theta12 - theta1 - theta2`|
//!
//! All rates are in bits per source sample, normalized by the full block
//! length, and all logarithms are base 2.

use crate::error::{ensure, ProfileViolation, Result};

/// Tolerance used when checking profile bounds.
pub const PROFILE_TOL: f64 = 1e-12;

/// Per-source sampling fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingBudget {
    theta1: f64,
    theta2: f64,
}

impl SamplingBudget {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        for (index, value) in [(1u8, theta1), (2u8, theta2)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ProfileViolation::FractionOutOfRange { index, value }.into());
            }
        }
        Ok(Self { theta1, theta2 })
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// `((theta1 + theta2 - 1)^+, min(theta1, theta2))`.
    pub fn theta12_bounds(&self) -> (f64, f64) {
        theta12_bounds(self)
    }

    /// Builds the profile with overlap `theta12`, validating it.
    pub fn profile(&self, theta12: f64) -> Result<SamplingProfile> {
        SamplingProfile::new(*self, theta12)
    }

    /// Profile with the smallest admissible overlap.
    pub fn min_overlap_profile(&self) -> SamplingProfile {
        let (lo, _) = self.theta12_bounds();
        SamplingProfile { budget: *self, theta12: lo }
    }

    /// Profile with the largest admissible overlap.
    pub fn max_overlap_profile(&self) -> SamplingProfile {
        let (_, hi) = self.theta12_bounds();
        SamplingProfile { budget: *self, theta12: hi }
    }
}

/// Admissible range of the overlap fraction for a budget.
pub fn theta12_bounds(budget: &SamplingBudget) -> (f64, f64) {
    let lo = (budget.theta1 + budget.theta2 - 1.0).max(0.0);
    let hi = budget.theta1.min(budget.theta2);
    (lo, hi)
}

/// A budget together with an admissible overlap fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingProfile {
    budget: SamplingBudget,
    theta12: f64,
}

impl SamplingProfile {
    /// Validates the overlap against the budget; values within
    /// [`PROFILE_TOL`] of a bound are snapped onto it.
    pub fn new(budget: SamplingBudget, theta12: f64) -> Result<Self> {
        validate_profile(budget.theta1, budget.theta2, theta12)?;
        let (lo, hi) = budget.theta12_bounds();
        Ok(Self { budget, theta12: theta12.clamp(lo, hi) })
    }

    /// Convenience constructor from the raw triple.
    pub fn from_triple(theta1: f64, theta2: f64, theta12: f64) -> Result<Self> {
        Self::new(SamplingBudget::new(theta1, theta2)?, theta12)
    }

    pub fn budget(&self) -> SamplingBudget {
        self.budget
    }

    pub fn theta1(&self) -> f64 {
        self.budget.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.budget.theta2
    }

    pub fn theta12(&self) -> f64 {
        self.theta12
    }

    pub fn weights(&self) -> FractionWeights {
        FractionWeights::of(self)
    }
}

/// Checks the triple `(theta1, theta2, theta12)` against every profile
/// invariant, reporting the first violated bound.
pub fn validate_profile(theta1: f64, theta2: f64, theta12: f64) -> std::result::Result<(), ProfileViolation> {
    for (index, value) in [(1u8, theta1), (2u8, theta2)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(ProfileViolation::FractionOutOfRange { index, value });
        }
    }
    let lo = (theta1 + theta2 - 1.0).max(0.0);
    let hi = theta1.min(theta2);
    if theta12.is_nan() || theta12 > hi + PROFILE_TOL {
        return Err(ProfileViolation::AboveMax { value: theta12, bound: hi, excess: theta12 - hi });
    }
    if theta12 < lo - PROFILE_TOL {
        return Err(ProfileViolation::BelowMin { value: theta12, bound: lo, deficit: lo - theta12 });
    }
    Ok(())
}

/// The four time-sharing weights induced by a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionWeights {
    pub only1: f64,
    pub overlap: f64,
    pub only2: f64,
    pub none: f64,
}

impl FractionWeights {
    pub fn of(profile: &SamplingProfile) -> Self {
        let (t1, t2, t12) = (profile.theta1(), profile.theta2(), profile.theta12());
        Self {
            only1: (t1 - t12).max(0.0),
            overlap: t12.max(0.0),
            only2: (t2 - t12).max(0.0),
            none: (1.0 + t12 - t1 - t2).max(0.0),
        }
    }

    pub fn sum(&self) -> f64 {
        self.only1 + self.overlap + self.only2 + self.none
    }

    /// Combined weight of the two single-source fractions.
    pub fn exclusive(&self) -> f64 {
        self.only1 + self.only2
    }
}

/// Zero-mean, unit-variance jointly Gaussian pair with correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPair {
    rho: f64,
}

impl GaussianPair {
    pub fn new(rho: f64) -> Result<Self> {
        ensure((-1.0..=1.0).contains(&rho), || format!("correlation {rho} outside [-1, 1]"))?;
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Variance of `S1 + S2`.
    pub fn sum_variance(&self) -> f64 {
        2.0 * (1.0 + self.rho)
    }

    /// Correlation between `S1 + S2` and either source, `sqrt((1 + rho) / 2)`.
    pub fn rho_tilde(&self) -> f64 {
        ((1.0 + self.rho) / 2.0).sqrt()
    }
}

/// Doubly symmetric binary source: uniform bits with `S1 xor S2 ~ Bernoulli(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsbsModel {
    p: f64,
}

impl DsbsModel {
    pub fn new(p: f64) -> Result<Self> {
        ensure((0.0..=0.5).contains(&p), || format!("crossover probability {p} outside [0, 1/2]"))?;
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// The function of the two sources the decoder wants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetFunction {
    /// `T = S1` for Gaussian sources.
    GaussianIdentity,
    /// `T = S1 + S2` for Gaussian sources.
    GaussianSum,
    /// `T = S1 xor S2` for a DSBS.
    BinaryXor,
    /// `T = S1 and S2` for a DSBS.
    BinaryAnd,
}

impl TargetFunction {
    pub fn tag(&self) -> &'static str {
        match self {
            TargetFunction::GaussianIdentity => "gaussian-identity",
            TargetFunction::GaussianSum => "gaussian-sum",
            TargetFunction::BinaryXor => "binary-xor",
            TargetFunction::BinaryAnd => "binary-and",
        }
    }
}

/// A source model paired with a target function it supports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Computation {
    GaussianIdentity(GaussianPair),
    GaussianSum(GaussianPair),
    BinaryXor(DsbsModel),
    BinaryAnd(DsbsModel),
}

impl Computation {
    pub fn target(&self) -> TargetFunction {
        match self {
            Computation::GaussianIdentity(_) => TargetFunction::GaussianIdentity,
            Computation::GaussianSum(_) => TargetFunction::GaussianSum,
            Computation::BinaryXor(_) => TargetFunction::BinaryXor,
            Computation::BinaryAnd(_) => TargetFunction::BinaryAnd,
        }
    }
}

/// `h(x) = -x log2 x - (1-x) log2 (1-x)` in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    ensure((0.0..=1.0).contains(&x), || format!("probability {x} outside [0, 1]"))?;
    Ok(entropy_bits(x))
}

/// Binary entropy without range checking; arguments are clamped into `[0, 1]`.
#[inline]
pub(crate) fn entropy_bits(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Inverse of the binary entropy on `[0, 1/2]`.
pub fn inv_binary_entropy(bits: f64) -> Result<f64> {
    ensure((0.0..=1.0).contains(&bits), || format!("entropy {bits} outside [0, 1]"))?;
    Ok(inv_entropy_bits(bits))
}

pub(crate) fn inv_entropy_bits(bits: f64) -> f64 {
    if bits <= 0.0 {
        return 0.0;
    }
    if bits >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if entropy_bits(mid) < bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
