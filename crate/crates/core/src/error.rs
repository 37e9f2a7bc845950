use thiserror::Error;

/// Errors raised by the numeric substrate, the map layer and the check registry.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} > {bound:e})")]
    NotHermitian { asymmetry: f64, bound: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e} < {bound:e})")]
    NotPsd { min_eig: f64, bound: f64 },

    #[error("singular matrix: min eigenvalue {min_eig:e} below floor {floor:e}")]
    SingularMatrix { min_eig: f64, floor: f64 },

    #[error("imaginary residue {residue:e} exceeds {bound:e} in {context}")]
    ImaginaryResidue {
        context: &'static str,
        residue: f64,
        bound: f64,
    },

    #[error("parameter outside domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown identifier: {0}")]
    Unknown(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("serialization error: {0}")]
    Serde(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
