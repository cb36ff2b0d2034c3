use thiserror::Error;

/// Errors raised across the crate. Variant names double as the
/// machine-readable `error` tag in CLI reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("partition length {length} exceeds N = {n}")]
    LengthExceedsN { length: usize, n: usize },
    #[error("inverse power sums need nonzero variables")]
    ZeroVariableForInverse,
    #[error("variables {0} and {1} coincide")]
    RepeatedVariable(usize, usize),
    #[error("r is singular at content {0}")]
    SingularContent(i64),
    #[error("negative bimoment index ({0}, {1}) needs a circle measure")]
    NegativeIndexUnsupported(i64, i64),
    #[error("quadrature did not converge after {points} points (last change {change:e})")]
    QuadratureNotConverged { points: usize, change: f64 },
    #[error("deformation of degree {degree} is not dominated by the potential ({detail})")]
    DivergentDeformation { degree: usize, detail: String },
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("direct quadrature supports N = 1, 2 only (got {0})")]
    NUnsupported(i64),
    #[error("bimoment window does not cover ({0}, {1})")]
    WindowTooSmall(i64, i64),
    #[error("series not converged: last shell {last_shell:e} above tolerance {tol:e}")]
    TruncationNotConverged { last_shell: f64, tol: f64 },
    #[error("state charge {found} does not match vacuum charge {expected}")]
    ChargeMismatch { expected: i64, found: i64 },
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Short tag used in machine-readable reports.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidPartition(_) => "InvalidPartition",
            Error::LengthExceedsN { .. } => "LengthExceedsN",
            Error::ZeroVariableForInverse => "ZeroVariableForInverse",
            Error::RepeatedVariable(..) => "RepeatedVariable",
            Error::SingularContent(_) => "SingularContent",
            Error::NegativeIndexUnsupported(..) => "NegativeIndexUnsupported",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::DivergentDeformation { .. } => "DivergentDeformation",
            Error::Divergent(_) => "Divergent",
            Error::NUnsupported(_) => "NUnsupported",
            Error::WindowTooSmall(..) => "WindowTooSmall",
            Error::TruncationNotConverged { .. } => "TruncationNotConverged",
            Error::ChargeMismatch { .. } => "ChargeMismatch",
            Error::BoundExceeded(_) => "BoundExceeded",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
