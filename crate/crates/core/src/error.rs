use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its documented range.
    InvalidParameter(String),
    /// An index (receiver, band, slot, ...) is out of range.
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    /// Array shapes do not agree.
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
    /// The training matrix has no left pseudo-inverse.
    SingularTraining,
    /// An exhaustive search or enumeration would exceed its budget.
    BudgetExceeded { what: &'static str, required: f64, limit: f64 },
    /// Every candidate received zero posterior weight.
    DegenerateObservation,
    /// A candidate set is empty.
    EmptyGrid,
    /// The exchange schedule does not match the data it is asked to carry.
    Schedule(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::IndexOutOfRange { what, index, len } => {
                write!(f, "{what} index {index} out of range (len {len})")
            }
            Error::DimensionMismatch { what, expected, found } => {
                write!(f, "{what}: expected length {expected}, found {found}")
            }
            Error::SingularTraining => write!(f, "training matrix is not pseudo-invertible"),
            Error::BudgetExceeded { what, required, limit } => {
                write!(f, "{what}: {required:.3e} evaluations exceed the budget of {limit:.0e}")
            }
            Error::DegenerateObservation => {
                write!(f, "observation has zero likelihood under every candidate")
            }
            Error::EmptyGrid => write!(f, "candidate grid is empty"),
            Error::Schedule(msg) => write!(f, "exchange schedule: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
