use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("row mismatch: left operand has {left} rows, right operand has {right}")]
    RowMismatch { left: usize, right: usize },
    #[error("column mismatch: top operand has {top} columns, bottom operand has {bottom}")]
    ColMismatch { top: usize, bottom: usize },
    #[error("axis mismatch on axis {axis}: extents differ off the concatenation axis")]
    AxisMismatch { axis: usize },
    #[error("position out of bounds: {0}")]
    OutOfBounds(String),
    #[error("shape {k1}x{k2} does not fit a {rows}x{cols} matrix")]
    ShapeTooLarge { k1: usize, k2: usize, rows: usize, cols: usize },
    #[error("work budget of {limit} steps exceeded")]
    BudgetExceeded { limit: u64 },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("cycle detected through variable {0}")]
    CycleDetected(String),
    #[error("dimension mismatch in rule {0}")]
    DimMismatch(String),
    #[error("variables {0} and {1} have the same right-hand side")]
    DuplicateRhs(String, String),
    #[error("dangling variable reference in rule {0}")]
    DanglingVariable(String),
    #[error("run-length count must be at least 2 in rule {0}")]
    BadRunCount(String),
    #[error("scheme is not a partition: {0}")]
    NotPartition(String),
    #[error("cyclic map: {0}")]
    CyclicMap(String),
    #[error("phrase source out of bounds: {0}")]
    OutOfBoundsSource(String),
    #[error("matrix is not a 2^i x 2^i square ({rows}x{cols})")]
    NotPowerOfTwoSquare { rows: usize, cols: usize },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, column, message: message.into() }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } | Error::TooLarge(_) => 3,
            Error::Parse { .. } => 4,
            _ => 2,
        }
    }
}
