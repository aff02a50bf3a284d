use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("no symmetry operator exists: {0}")]
    UnsolvableSymmetry(String),
    #[error("support length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("error pattern sized for {got} qubits, code has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid Pauli channel: {0}")]
    InvalidChannel(String),
    #[error("operation not supported for family {0}")]
    UnsupportedFamily(String),
    #[error("operation not supported for the {0} imprinter sector")]
    UnsupportedSector(String),
    #[error("odd number of defects ({0}) cannot be perfectly matched")]
    OddDefectCount(usize),
    #[error("exhaustive enumeration over {n} qubits exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("all {0} samples carried a logical residual")]
    NoKeptSamples(u64),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("insufficient data for fit: {0}")]
    InsufficientData(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("invalid Bacon-Shor shape: {0}")]
    InvalidShape(String),
    #[error("no valid shape for N = {0}")]
    NoValidShape(usize),
    #[error("invalid probability grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// Variant name, used as the error class in CLI diagnostics.
    pub fn class(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::UnsolvableSymmetry(_) => "UnsolvableSymmetry",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::InvalidChannel(_) => "InvalidChannel",
            Error::UnsupportedFamily(_) => "UnsupportedFamily",
            Error::UnsupportedSector(_) => "UnsupportedSector",
            Error::OddDefectCount(_) => "OddDefectCount",
            Error::TooLarge { .. } => "TooLarge",
            Error::NoKeptSamples(_) => "NoKeptSamples",
            Error::OutOfRange(_) => "OutOfRange",
            Error::InsufficientData(_) => "InsufficientData",
            Error::DegenerateFit(_) => "DegenerateFit",
            Error::SingularPoint(_) => "SingularPoint",
            Error::InvalidShape(_) => "InvalidShape",
            Error::NoValidShape(_) => "NoValidShape",
            Error::InvalidGrid(_) => "InvalidGrid",
        }
    }
}
