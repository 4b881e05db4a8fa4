use thiserror::Error;

/// Errors raised by the solvers in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sampling profile violates one of its bounds.
    #[error("invalid sampling profile: {0}")]
    Profile(#[from] ProfileViolation),

    /// The requested distortion is below the achievable floor.
    #[error("distortion {requested} is below the achievable floor {floor}")]
    InfeasibleDistortion { requested: f64, floor: f64 },

    /// The model degenerates at these parameters (e.g. the target is constant).
    #[error("degenerate model: {0}")]
    Degenerate(String),

    /// A closed form was called outside the regime where it holds.
    #[error("outside closed-form regime: {0}")]
    Regime(String),

    /// A brute-force search found no feasible point.
    #[error("no feasible point in the search box")]
    NoFeasiblePoint,
}

/// Which sampling-profile bound is violated, and by how much.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileViolation {
    #[error("theta{index} = {value} is outside [0, 1]")]
    FractionOutOfRange { index: u8, value: f64 },
    #[error("theta12 = {value} exceeds theta12_max = {bound} by {excess}")]
    AboveMax { value: f64, bound: f64, excess: f64 },
    #[error("theta12 = {value} is below theta12_min = {bound} by {deficit}")]
    BelowMin { value: f64, bound: f64, deficit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}
