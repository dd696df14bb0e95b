use std::time::Instant;

use super::{SolveOutcome, Status};
use crate::model::{check_solution, MilpModel, PlacementSolution};

/// Adds one replication at a time. Each round takes the first feasible
/// increment in order of (objective gain, pair index): increments landing
/// on a site whose backup servers already cover the new count gain one, all
/// others gain nothing. Stops when no increment is feasible.
pub fn solve_greedy(model: &MilpModel) -> SolveOutcome {
    let started = Instant::now();
    let instance = model.instance();
    let n = instance.len();
    let pairs: Vec<(usize, usize, i64)> = instance
        .topology
        .directed_pairs()
        .into_iter()
        .map(|(i, j)| {
            let ub = model
                .c_var(i, j)
                .map_or(0, |v| model.variables()[v.0].upper as i64);
            (i, j, ub)
        })
        .collect();

    let mut current = PlacementSolution::zeros(n);
    let mut c = vec![vec![0; n]; n];
    let mut checks = 0;
    loop {
        let mut candidates: Vec<(i64, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(_, &(i, j, ub))| c[i][j] < ub)
            .map(|(idx, &(i, j, _))| (i64::from(current.b[j] > c[i][j]), idx))
            .collect();
        candidates.sort_by_key(|&(gain, idx)| (-gain, idx));

        let mut advanced = false;
        for (_, idx) in candidates {
            let (i, j, _) = pairs[idx];
            c[i][j] += 1;
            checks += 1;
            let next = PlacementSolution::derive(instance, c.clone());
            if check_solution(&next, instance).is_empty() {
                current = next;
                advanced = true;
                break;
            }
            c[i][j] -= 1;
        }
        if !advanced {
            break;
        }
    }

    SolveOutcome {
        solution: current,
        status: Status::Feasible,
        nodes_explored: checks,
        wall_time: started.elapsed(),
    }
}
