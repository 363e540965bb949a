use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge ({u}, {v}) appears more than once")]
    DuplicateEdge { u: String, v: String },

    #[error("self-loop at vertex {0}")]
    SelfLoop(String),

    #[error("negative weight {weight} on edge ({u}, {v})")]
    NegativeWeight { u: String, v: String, weight: f64 },

    #[error("invalid weight matrix: {0}")]
    InvalidMatrix(String),

    #[error("vertex index {index} out of range for {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("zero volume")]
    ZeroVolume,

    #[error("vertex {0} has zero degree")]
    ZeroDegree(usize),

    #[error("graph is not connected")]
    Disconnected,

    #[error("eigensolver did not converge at index {0}")]
    EigenFailure(usize),

    #[error("invalid cluster count k={k} for n={n}")]
    BadK { k: usize, n: usize },

    #[error("instance too large for exhaustive enumeration: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("eigenvalue subsets are not separated (delta = {0})")]
    NoSeparation(f64),

    #[error("edge weight {0} outside [0, 1]")]
    WeightsNotProbabilities(f64),

    #[error("invalid size: {0}")]
    BadSize(String),

    #[error("no eigenvalue gap after index {k_minus_1} (gap = {gap})")]
    NoGap { k_minus_1: usize, gap: f64 },

    #[error("invalid schedule: {0}")]
    BadSchedule(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl Error {
    /// Short stable name of the error case, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::DuplicateEdge { .. } => "DuplicateEdge",
            Error::SelfLoop(_) => "SelfLoop",
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::InvalidMatrix(_) => "InvalidMatrix",
            Error::VertexOutOfRange { .. } => "VertexOutOfRange",
            Error::ZeroVolume => "ZeroVolume",
            Error::ZeroDegree(_) => "ZeroDegree",
            Error::Disconnected => "Disconnected",
            Error::EigenFailure(_) => "EigenFailure",
            Error::BadK { .. } => "BadK",
            Error::TooLarge { .. } => "TooLarge",
            Error::NoSeparation(_) => "NoSeparation",
            Error::WeightsNotProbabilities(_) => "WeightsNotProbabilities",
            Error::BadSize(_) => "BadSize",
            Error::NoGap { .. } => "NoGap",
            Error::BadSchedule(_) => "BadSchedule",
            Error::DimensionMismatch(_) => "DimensionMismatch",
        }
    }

    /// Numerical failures, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::EigenFailure(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
