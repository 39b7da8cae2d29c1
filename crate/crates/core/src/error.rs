use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PsqmError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("adjoint series did not terminate within {0} nested commutators")]
    NonNilpotent(usize),
    #[error("state is identically zero")]
    ZeroState,
    #[error("grid mismatch")]
    GridMismatch,
    #[error("grid of {points} points exceeds the memory cap of {cap} complex values")]
    MemoryCap { points: u128, cap: u128 },
    #[error("non-finite value at grid node {0}")]
    NonFinite(usize),
    #[error("axis {axis} out of range for {naxes} axes")]
    AxisOutOfRange { axis: usize, naxes: usize },
    #[error("truncation order {order} exceeds the cap {cap}")]
    OrderCap { order: usize, cap: usize },
    #[error("series term cap of {0} exceeded")]
    TermCap(usize),
    #[error("imaginary residue {residue:e} exceeds tolerance {tol:e}")]
    ImaginaryResidue { residue: f64, tol: f64 },
    #[error("norm drift {drift:e} at t = {time} exceeds {limit:e}")]
    NormDrift { drift: f64, time: f64, limit: f64 },
    #[error("discretization too coarse: eigenvalue drift {drift:e} exceeds {limit:e}")]
    TooCoarse { drift: f64, limit: f64 },
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("field file: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for PsqmError {
    fn from(e: std::io::Error) -> Self {
        PsqmError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PsqmError>;
