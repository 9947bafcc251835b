use alloc::string::String;
use core::fmt;

/// Errors raised by the core routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument violated a documented precondition; the message names the
    /// failed clause.
    InvalidArgument(String),
    /// A bound's hypotheses do not hold at the requested parameters.
    NotApplicable(String),
    /// The instance exceeds a fixed exhaustive-enumeration budget.
    BudgetExceeded { what: &'static str, limit: u64, requested: u64 },
    /// The search visited more nodes than allowed. `lower_bound` is one more
    /// than the longest good coloring found before stopping (0 if untracked).
    NodeBudgetExceeded { nodes: u64, budget: u64, lower_bound: usize },
    /// The search was cancelled by its monitor (wall-clock budget, Ctrl-C, ...).
    Cancelled { nodes: u64, lower_bound: usize },
    /// Good colorings still exist at the search ceiling; `lower_bound` is the
    /// best proven lower bound on the Ramsey-type number.
    CeilingReached { max_n: usize, lower_bound: usize },
    /// A numeric procedure failed to converge or bracket.
    Numeric(String),
    /// Text could not be parsed.
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NotApplicable(msg) => write!(f, "not applicable: {msg}"),
            Error::BudgetExceeded { what, limit, requested } => {
                write!(f, "{what} budget exceeded: requested {requested}, limit {limit}")
            }
            Error::NodeBudgetExceeded {
                nodes,
                budget,
                lower_bound,
            } => {
                write!(f, "node budget exceeded: {nodes} nodes explored, budget {budget}")?;
                lower_bound_note(f, *lower_bound)
            }
            Error::Cancelled { nodes, lower_bound } => {
                write!(f, "search cancelled after {nodes} nodes")?;
                lower_bound_note(f, *lower_bound)
            }
            Error::CeilingReached { max_n, lower_bound } => {
                write!(f, "ceiling reached: good colorings exist at n = {max_n}; value >= {lower_bound}")
            }
            Error::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

fn lower_bound_note(f: &mut fmt::Formatter<'_>, lower_bound: usize) -> fmt::Result {
    if lower_bound > 0 {
        write!(f, "; value >= {lower_bound}")?;
    }
    Ok(())
}

impl Error {
    /// Best proven lower bound carried by an interrupted or capped search.
    pub fn search_lower_bound(&self) -> Option<usize> {
        match *self {
            Error::NodeBudgetExceeded { lower_bound, .. } | Error::Cancelled { lower_bound, .. } if lower_bound > 0 => Some(lower_bound),
            Error::CeilingReached { lower_bound, .. } => Some(lower_bound),
            _ => None,
        }
    }

    /// Tags an interrupted search with `bound`.
    pub(crate) fn with_lower_bound(self, bound: usize) -> Error {
        match self {
            Error::NodeBudgetExceeded { nodes, budget, .. } => Error::NodeBudgetExceeded {
                nodes,
                budget,
                lower_bound: bound,
            },
            Error::Cancelled { nodes, .. } => Error::Cancelled { nodes, lower_bound: bound },
            e => e,
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
