use std::time::Instant;

use super::{rank, SolveError, SolveOutcome, Status};
use crate::model::{check_solution, Instance, PlacementSolution};

pub const ORACLE_MAX_SITES: usize = 6;
pub const ORACLE_MAX_C: i64 = 3;

/// Enumerates every replication matrix with `c_ij ≤ min(max_c, ⌊αW_ij/B⌋)`,
/// completes each with [`PlacementSolution::derive`] and keeps the best one
/// that passes [`check_solution`].
///
/// Feasibility is monotone: raising any c_ij only adds load, reservations,
/// indicators and active sites. A subtree is therefore abandoned as soon as
/// its root fails the checker, which keeps the search exhaustive.
pub fn brute_force_oracle(instance: &Instance, max_c: i64) -> Result<SolveOutcome, SolveError> {
    let n = instance.len();
    if n > ORACLE_MAX_SITES || !(0..=ORACLE_MAX_C).contains(&max_c) {
        return Err(SolveError::OracleGuard { sites: n, max_c });
    }
    let started = Instant::now();
    let pairs: Vec<(usize, usize, i64)> = instance
        .topology
        .directed_pairs()
        .into_iter()
        .map(|(i, j)| (i, j, instance.c_bound(i, j).min(max_c)))
        .collect();

    let mut search = Search {
        instance,
        pairs,
        c: vec![vec![0; n]; n],
        best: PlacementSolution::zeros(n),
        checks: 0,
    };
    // the empty placement is the first leaf and always feasible
    search.best = PlacementSolution::derive(instance, search.c.clone());
    search.descend(0);

    Ok(SolveOutcome {
        solution: search.best,
        status: Status::Optimal,
        nodes_explored: search.checks,
        wall_time: started.elapsed(),
    })
}

struct Search<'a> {
    instance: &'a Instance,
    pairs: Vec<(usize, usize, i64)>,
    c: Vec<Vec<i64>>,
    best: PlacementSolution,
    checks: u64,
}

impl Search<'_> {
    fn descend(&mut self, pos: usize) {
        if pos == self.pairs.len() {
            self.leaf();
            return;
        }
        let (i, j, ub) = self.pairs[pos];
        for v in 0..=ub {
            self.c[i][j] = v;
            if v > 0 {
                self.checks += 1;
                let s = PlacementSolution::derive(self.instance, self.c.clone());
                if !check_solution(&s, self.instance).is_empty() {
                    break;
                }
            }
            self.descend(pos + 1);
        }
        self.c[i][j] = 0;
    }

    fn leaf(&mut self) {
        let n = self.c.len();
        let primary: i64 = self.c.iter().flatten().sum();
        let backup: i64 = (0..n)
            .map(|j| (0..n).map(|i| self.c[i][j]).max().unwrap_or(0))
            .sum();
        if (primary - backup, primary) > rank(&self.best) {
            self.best = PlacementSolution::derive(self.instance, self.c.clone());
        }
    }
}
