//! Solvers for the placement program.
//!
//! * [`solve_exact`]: LP-based branch and bound with an optimality proof.
//! * [`brute_force_oracle`]: exhaustive enumeration for tiny instances.
//! * [`solve_greedy`]: one replication at a time, for large instances.
//!
//! The exact solver and the oracle both order optima lexicographically by
//! (Σ(x − b), Σx): among placements with the best backup savings, the one
//! supporting the most primary servers wins. This makes the reported totals
//! independent of which optimum a search happens to reach first.

mod exact;
mod greedy;
mod oracle;

use std::fmt;
use std::time::Duration;

use serde::Serialize;

use crate::model::PlacementSolution;

pub use exact::{solve_exact, ExactOptions};
pub use greedy::solve_greedy;
pub use oracle::{brute_force_oracle, ORACLE_MAX_C, ORACLE_MAX_SITES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Optimal,
    Feasible,
    Timeout,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "OPTIMAL",
            Status::Feasible => "FEASIBLE",
            Status::Timeout => "TIMEOUT",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: PlacementSolution,
    pub status: Status,
    pub nodes_explored: u64,
    pub wall_time: Duration,
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("variable {0} has no finite bounds")]
    UnboundedVariable(String),
    #[error("time limit reached before any feasible placement was found")]
    NoIncumbent,
    #[error(
        "instance too large for exhaustive search: {sites} sites (max {}), max_c {max_c} (max {})",
        ORACLE_MAX_SITES,
        ORACLE_MAX_C
    )]
    OracleGuard { sites: usize, max_c: i64 },
    #[error("linear relaxation failed: {0}")]
    Lp(String),
}

/// Lexicographic rank used to compare optima.
pub(crate) fn rank(s: &PlacementSolution) -> (i64, i64) {
    (s.objective, s.total_primary())
}
