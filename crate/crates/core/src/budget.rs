use crate::field_linalg::DEFAULT_ENUMERATION_BUDGET;
use crate::index_codes::{DEFAULT_ALPHA_CAP, DEFAULT_ASSIGNMENT_BUDGET};

/// Default limit on backtracking nodes per length in the column searches (2^32).
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 32;

/// Work limits shared by every exhaustive routine. Exceeding one is reported
/// as an error or an `Unknown` result, never as a negative answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Vectors visited by any single enumeration.
    pub enumeration: u64,
    /// Backtracking nodes per length in the column searches.
    pub nodes: u64,
    /// Assignments covered by the min-rank search.
    pub assignments: u64,
    /// Largest n for the generalized independence number search.
    pub alpha_cap: usize,
    /// Worker threads for the column searches.
    pub jobs: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            enumeration: DEFAULT_ENUMERATION_BUDGET,
            nodes: DEFAULT_NODE_BUDGET,
            assignments: DEFAULT_ASSIGNMENT_BUDGET,
            alpha_cap: DEFAULT_ALPHA_CAP,
            jobs: 1,
        }
    }
}
