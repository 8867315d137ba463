use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("coordinate {coord} out of range for a class over {num_coords} coordinates")]
    CoordOutOfRange { coord: usize, num_coords: usize },

    #[error("coordinate {0} repeated in sequence")]
    RepeatedCoord(usize),

    #[error("empty coordinate sequence")]
    EmptySequence,

    #[error("label {label} outside [1..{label_bound}]")]
    LabelOutOfRange { label: u32, label_bound: u32 },

    #[error("row has length {found}, expected {expected}")]
    RowLength { expected: usize, found: usize },

    #[error("hypothesis class must contain at least one row")]
    EmptyClass,

    #[error("class would have {requested} rows, above the cap of {cap}")]
    SizeCap { requested: u128, cap: u128 },

    #[error("row is not a member of the class")]
    NotInClass,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sample is not realizable: {0}")]
    NotRealizable(String),

    #[error("search budget of {cap} exhausted")]
    CapExceeded { cap: u64 },

    #[error("orientation invalid: {0}")]
    InvalidOrientation(String),

    #[error("compression failed: {0}")]
    Compression(String),
}

pub type Result<T> = std::result::Result<T, Error>;
