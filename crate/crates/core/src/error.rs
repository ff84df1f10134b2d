use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("exponent p = {0} outside the supported range [1.1, 10]")]
    InvalidExponent(f64),

    #[error("weight {index} = {value} is not a strictly positive finite number")]
    InvalidWeight { index: usize, value: f64 },

    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("radius {0} must be positive and finite")]
    InvalidRadius(f64),

    #[error("cylinder mask must be nonempty")]
    EmptyMask,

    #[error("mask index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("operation not supported for {0}")]
    Unsupported(&'static str),

    #[error("point is not on the boundary (distance {0:e} from the radius)")]
    NotOnBoundary(f64),

    #[error("no Fréchet derivative exists at boundary points")]
    NoFrechetDerivative,

    #[error("no nonsmoothness witness found (largest defect ratio {0:e})")]
    WitnessNotFound(f64),

    #[error("sample {index} lies outside the set")]
    OutsideSet { index: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
