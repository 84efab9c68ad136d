use thiserror::Error;

/// Errors raised by the simulator.
///
/// Variants fall in two families: precondition violations (bad arguments,
/// mismatched dimensions) and numerical failures (ill-conditioned frames,
/// excessive leakage). [`Error::is_numerical`] separates them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("grid mismatch: {0} vs {1} sites per axis")]
    GridMismatch(usize, usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid shell: {0}")]
    InvalidShell(String),

    #[error("shell contains no lattice sites")]
    EmptySupport,

    #[error("insufficient resolution: {sites} shell sites, need at least {required}")]
    Resolution { sites: usize, required: usize },

    #[error("ill-conditioned frame: {0}")]
    Conditioning(String),

    #[error("angle {0} out of range for a shear rotation (|theta| <= pi/2)")]
    AngleRange(f64),

    #[error("lattice rotations only support principal axes")]
    UnsupportedAxis,

    #[error("not a bijection: {0}")]
    NotBijective(String),

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("leakage {0:.3e} exceeds the usable limit")]
    Leakage(f64),

    #[error("numerical degeneracy: {0}")]
    Degeneracy(String),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Conditioning(_) | Error::Leakage(_) | Error::Degeneracy(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
