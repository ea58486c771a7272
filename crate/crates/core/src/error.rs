use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown flag manifold `{0}`")]
    UnknownSpace(String),

    #[error("parameter out of range for family {family}: {bound} (got l={l}, p={p})")]
    ParameterOutOfRange {
        family: char,
        bound: &'static str,
        l: u32,
        p: u32,
    },

    #[error("invalid summand dimensions: {0}")]
    InvalidDimensions(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("metric coefficient {index} must be finite and strictly positive, got {value}")]
    NonPositiveMetric { index: usize, value: f64 },

    #[error("invalid structure constant table: {0}")]
    InvalidTriples(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("the affine chart has no boundary restriction")]
    AffineChart,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("expected {expected} Einstein metrics for {space}, found {found}")]
    EinsteinCount {
        space: String,
        expected: usize,
        found: usize,
    },

    #[error("eigenvalue residual {residual} exceeds tolerance")]
    EigenResidual { residual: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
