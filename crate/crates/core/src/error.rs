use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),

    #[error("field order {q} exceeds the cap of {cap}")]
    CapExceeded { q: u32, cap: u32 },

    #[error("elements from GF({left}) and GF({right}) cannot be mixed")]
    FieldMismatch { left: u32, right: u32 },

    #[error("element {value} is not in GF({q})")]
    ElementOutOfRange { value: u32, q: u32 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("linear system has no solution")]
    NoSolution,

    #[error("no solution of weight at most {cap}")]
    WeightCapExceeded { cap: usize },

    #[error("{what}: {needed} exceeds the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        budget: u64,
    },

    #[error("malformed document: {0}")]
    MalformedDocument(String),

    #[error("receiver {receiver} demands message {demand}, which is in its side information")]
    DemandInSideInfo { receiver: usize, demand: usize },

    #[error("{what} index {index} out of range 1..={max}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        max: usize,
    },

    #[error("index set must be nonempty")]
    EmptySet,

    #[error("code has dimension zero")]
    ZeroDimension,

    #[error("parameters outside the supported regime: {0}")]
    OutOfRegime(String),

    #[error("inner matrix is not an index code for the instance")]
    InvalidInnerIc,

    #[error("outer code distance {distance} is below the required {required}")]
    OuterDistanceTooSmall { distance: usize, required: usize },

    #[error("N_{q}[{k},{d}] is not in the table and its search exceeded the budget")]
    UnknownCodeLength { q: u32, k: usize, d: usize },

    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
}

impl Error {
    pub(crate) fn budget(what: &'static str, needed: impl ToString, budget: u64) -> Self {
        Error::BudgetExceeded {
            what,
            needed: needed.to_string(),
            budget,
        }
    }

    /// True for failures caused by a search or enumeration limit rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::UnknownCodeLength { .. })
    }
}
