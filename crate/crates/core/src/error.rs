use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { name: String, offset: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("jet order {0} out of range 0..=4")]
    OrderOutOfRange(usize),

    #[error("insufficient jet order: need {needed}, have {available}")]
    InsufficientJetOrder { needed: usize, available: usize },

    #[error("metric is not positive definite or is singular at {0:?}")]
    DegenerateMetric([f64; 4]),

    #[error("endomorphism is not skew-adjoint (residual {0:.3e})")]
    NotSkew(f64),

    #[error("almost complex structure incompatible: {0}")]
    Incompatible(String),

    #[error("degenerate frame seed (norm {0:.3e})")]
    DegenerateSeed(f64),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("unknown manifold `{0}`")]
    UnknownManifold(String),

    #[error("point {0:?} lies outside the chart domain")]
    OutOfDomain([f64; 4]),

    #[error("manifold `{0}` is not compact")]
    NonCompact(String),

    #[error("quadrature refinement did not converge (error estimates {0:.3e} -> {1:.3e})")]
    NonConvergent(f64, f64),

    #[error("manifold `{0}` has no almost complex structure")]
    MissingStructure(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("manifold specification invalid:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
