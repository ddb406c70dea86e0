use core::fmt;

/// Errors produced by matrix construction, the algorithms and the oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The matrix needs at least two rows and two columns.
    Degenerate {
        /// Rows supplied.
        rows: usize,
        /// Columns supplied.
        cols: usize,
    },
    /// Columns (or rows) of unequal length.
    Ragged,
    /// A NaN or infinite value where a finite real is required.
    NonFinite,
    /// A partition side or column subset was empty.
    EmptyPartitionSide,
    /// A partition does not fit the matrix.
    InvalidPartition(&'static str),
    /// Column index out of range.
    ColumnOutOfRange {
        /// Requested column.
        column: usize,
        /// Number of columns.
        n: usize,
    },
    /// A permutation is not a bijection on `0..m`.
    MalformedPermutation,
    /// Spearman correlation is undefined because an input is constant.
    UndefinedSpearman,
    /// Exact enumeration over all partitions exceeds the configured cap.
    PartitionCapExceeded {
        /// Number of columns.
        n: usize,
        /// Largest supported column count for exact mode.
        cap: usize,
    },
    /// Partition bit masks support at most 64 columns.
    TooManyColumns(usize),
    /// Exhaustive enumeration exceeds the arrangement budget.
    BudgetExceeded {
        /// Arrangements the scan would need (saturating).
        required: u128,
        /// Configured budget.
        budget: u128,
    },
    /// A length mismatch between related inputs.
    LengthMismatch {
        /// Expected length.
        expected: usize,
        /// Actual length.
        found: usize,
    },
    /// An argument is outside its valid domain.
    InvalidArgument(&'static str),
    /// An objective evaluated to a non-finite or negative value.
    InvalidObjective(f64),
}

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Degenerate { rows, cols } => write!(
                f,
                "matrix must have at least 2 rows and 2 columns (got {rows}x{cols})"
            ),
            Error::Ragged => f.write_str("rows or columns have unequal lengths"),
            Error::NonFinite => f.write_str("non-finite entry"),
            Error::EmptyPartitionSide => f.write_str("empty partition side"),
            Error::InvalidPartition(why) => write!(f, "invalid partition: {why}"),
            Error::ColumnOutOfRange { column, n } => {
                write!(f, "column {column} out of range for {n} columns")
            }
            Error::MalformedPermutation => f.write_str("malformed permutation"),
            Error::UndefinedSpearman => {
                f.write_str("undefined Spearman correlation: constant input")
            }
            Error::PartitionCapExceeded { n, cap } => write!(
                f,
                "exact dependence measure over {n} columns exceeds the cap of {cap}; use sampled mode"
            ),
            Error::TooManyColumns(n) => {
                write!(f, "{n} columns exceed the 64-column partition limit")
            }
            Error::BudgetExceeded { required, budget } => write!(
                f,
                "enumeration needs {required} arrangements, budget is {budget}"
            ),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
            Error::InvalidObjective(v) => write!(f, "objective evaluated to {v}"),
        }
    }
}

impl core::error::Error for Error {}
