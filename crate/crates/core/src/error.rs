use thiserror::Error;

/// Every failure the library can report. `kind()` gives a stable
/// machine-readable tag used by the CLI error object.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate boundary: {0}")]
    DegenerateBoundary(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("chart too small at {center:?} (radius {radius:e})")]
    ChartTooSmall { center: [f64; 3], radius: f64 },
    #[error("map vanishes on the sphere near {0:?}")]
    VanishingOnSphere([f64; 3]),
    #[error("resolution exhausted: {0}")]
    ResolutionExhausted(String),
    #[error("no regular value found in {0} trials")]
    NoRegularValue(usize),
    #[error("suspected non-isolated zero near {0:?}")]
    SuspectedNonIsolatedZero([f64; 3]),
    #[error("vector field vanishes on the boundary near {0:?}")]
    ZeroOnBoundary([f64; 3]),
    #[error("vector field is not tame: {0}")]
    NotTame(String),
    #[error("degree unstable under radius change: {0}")]
    DegreeUnstable(String),
    #[error("could not tame the field after {0} seeds")]
    CannotTame(usize),
    #[error("Euler characteristic unstable under refinement: {0}")]
    Unstable(String),
    #[error("unknown shape `{0}`")]
    UnknownShape(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at `{key}`: {message}")]
    Schema { key: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownVariable { .. } => "UnknownVariable",
            Error::ArityMismatch(_) => "ArityMismatch",
            Error::Domain(_) => "DomainError",
            Error::DegenerateBoundary(_) => "DegenerateBoundary",
            Error::NoConvergence(_) => "NoConvergence",
            Error::ChartTooSmall { .. } => "ChartTooSmall",
            Error::VanishingOnSphere(_) => "VanishingOnSphere",
            Error::ResolutionExhausted(_) => "ResolutionExhausted",
            Error::NoRegularValue(_) => "NoRegularValue",
            Error::SuspectedNonIsolatedZero(_) => "SuspectedNonIsolatedZero",
            Error::ZeroOnBoundary(_) => "ZeroOnBoundary",
            Error::NotTame(_) => "NotTame",
            Error::DegreeUnstable(_) => "DegreeUnstable",
            Error::CannotTame(_) => "CannotTame",
            Error::Unstable(_) => "Unstable",
            Error::UnknownShape(_) => "UnknownShape",
            Error::Parse { .. } => "ParseError",
            Error::Schema { .. } => "SchemaError",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
