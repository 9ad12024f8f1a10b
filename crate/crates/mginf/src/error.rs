use thiserror::Error;

/// Errors shared by every module in the crate.
///
/// Parameter errors name the violated constraint and carry the offending
/// value so callers can report it without re-deriving anything.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lambda must be a positive finite number, got {0}")]
    NonPositiveLambda(f64),

    #[error("rho must be a positive finite number, got {0}")]
    NonPositiveRho(f64),

    #[error("p must lie in [0, 1), got {0}")]
    POutOfRange(f64),

    #[error("beta must be at least -lambda = {min}, got {beta}")]
    BetaBelowMinusLambda { beta: f64, min: f64 },

    #[error("beta exceeds beta_max = {beta_max:.12}, got {beta}")]
    BetaAboveMax { beta: f64, beta_max: f64 },

    /// beta = -lambda collapses the law to a point mass at zero; operations
    /// that need a density or a positive rate reject it explicitly.
    #[error("operation undefined at beta = -lambda (service time is a point mass at zero)")]
    DegenerateParameter,

    #[error("u must lie in [0, 1), got {0}")]
    UOutOfRange(f64),

    /// The geometric ratio (e^rho - 1) e^{-At} must stay below one for the
    /// series form to converge; at t = 0 this is exactly rho < ln 2.
    #[error("series diverges: (e^rho - 1) e^(-A t) = {0} is not below 1")]
    SeriesDiverges(f64),

    #[error("series moments require rho < ln 2, got rho = {0}")]
    RhoTooLarge(f64),

    #[error("cross-ratio needs four distinct solutions: {0}")]
    IndistinctSolutions(String),

    #[error("beta = {beta} is inadmissible for rho = {rho} (beta_max = {beta_max:.12})")]
    BetaInadmissible { beta: f64, rho: f64, beta_max: f64 },

    #[error("at least {required} samples required, got {got}")]
    InsufficientSamples { required: usize, got: usize },

    #[error("renewal grid (origin, t_max, points) not configured")]
    MissingRenewalGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
