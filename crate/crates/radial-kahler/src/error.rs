use crate::quadrature::IntegralVerdict;

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: expected one of {expected:?}")]
    Syntax { offset: usize, expected: Vec<String> },

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("invalid exponent at offset {offset}: powers must fold to a numeric constant")]
    InvalidExponent { offset: usize },

    #[error("parameter `{name}` must be a positive finite real, got {value}")]
    InvalidParameter { name: String, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation produced a non-finite value at t = {t}")]
    Evaluation { t: f64 },

    #[error("tolerance {0} outside the supported range [1e-12, 1e-2]")]
    InvalidTolerance(f64),

    #[error("endpoint exponent hint {0} declares a non-integrable singularity (must be > -1)")]
    NonIntegrableHint(f64),

    #[error("classifier did not return opposite definite classes at the bracket endpoints")]
    SameClassAtEndpoints,

    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),

    #[error("radial distance from the puncture does not converge")]
    DivergentDistance(Box<IntegralVerdict>),

    #[error("potential is unbounded: {0}")]
    UnboundedPotential(String),

    #[error("growth assumption violated: {0}")]
    GrowthAssumptionViolated(String),

    #[error("weight class has no modulus bound: {0}")]
    UnsupportedClass(String),

    #[error("empty grid")]
    EmptyGrid,

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("unknown reference case `{0}`")]
    UnknownCase(String),

    #[error("mesh is disconnected between the requested nodes")]
    DisconnectedMesh,

    #[error("profile failed admissibility validation: {violations} grid points with chi' <= 0 or chi'' <= 0")]
    ProfileInvalid { violations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
