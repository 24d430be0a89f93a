use crate::graded::BasisIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),

    #[error("horizon {horizon} is too small (need at least {required})")]
    HorizonTooSmall { horizon: i32, required: i32 },

    #[error("bracket [{a}, {b}] reaches degree {degree}, beyond horizon {horizon}")]
    HorizonExceeded {
        a: BasisIndex,
        b: BasisIndex,
        degree: i32,
        horizon: i32,
    },

    #[error("basis index {0} is not part of the algebra")]
    NoSuchBasis(BasisIndex),

    #[error("bracket [{a}, {b}] has target {target} of degree {got}, expected {expected}")]
    GradingViolation {
        a: BasisIndex,
        b: BasisIndex,
        target: BasisIndex,
        got: i32,
        expected: i32,
    },

    #[error("conflicting entries for bracket [{a}, {b}]: {reason}")]
    ConflictingBracket {
        a: BasisIndex,
        b: BasisIndex,
        reason: String,
    },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("element is not homogeneous")]
    NotHomogeneous,

    #[error("expected an element of degree {expected}, got degree {got}")]
    WrongDegree { expected: i32, got: i32 },

    #[error("{0} lies outside the window of the map")]
    OutsideWindow(BasisIndex),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("index ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("column labels must be unique and match the column count")]
    BadLabels,

    #[error("no element of the extension realizes the map on the window: {0}")]
    Unrealizable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("test family is empty")]
    EmptyFamily,

    #[error("invalid scalar `{0}`")]
    BadScalar(String),

    #[error("invalid report: {0}")]
    BadReport(String),
}

impl Error {
    /// Strips any line-number wrapping.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } => source.root(),
            e => e,
        }
    }
}
