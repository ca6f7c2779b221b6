use thiserror::Error;

/// One step of an origin-limit sequence, kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonStep {
    pub epsilon: f64,
    /// Row-major 2x2 estimate of the origin matrix at this radius.
    pub matrix: [f64; 4],
    pub vector: [f64; 2],
    /// Max-norm change relative to the previous estimate.
    pub change: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("overflow evaluating {what} (l = {l}, rho = {rho})")]
    Overflow { what: &'static str, l: u32, rho: f64 },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid radial grid: {0}")]
    InvalidGrid(String),

    #[error("step size underflow at r = {r} (step {step})")]
    StepSize { r: f64, step: f64 },

    #[error("step budget of {max_steps} exhausted at r = {r}")]
    StepBudget { r: f64, max_steps: usize },

    #[error("non-finite coefficient at r = {r}")]
    Singularity { r: f64 },

    #[error("origin-limit matrix is singular at epsilon = {epsilon}")]
    SingularBeta { epsilon: f64 },

    #[error("origin limits did not converge over {} radii (last change {last_change:e})", trace.len())]
    NoConvergence {
        trace: Vec<EpsilonStep>,
        last_change: f64,
    },

    #[error("exchange-constant denominator {denominator:e} is resonant")]
    Resonance { denominator: f64 },

    #[error("{what} has no plateau: spread {spread:e} over window ending at r = {r_end}")]
    NoPlateau {
        what: &'static str,
        spread: f64,
        r_end: f64,
    },

    #[error("branch count ambiguous near r = {r}")]
    AmbiguousBranch { r: f64 },

    #[error("zero denominator in phase function at r = {r}")]
    ZeroDenominator { r: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
