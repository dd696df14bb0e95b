//! Depth-first branch and bound over the linear relaxation.
//!
//! Every variable of the placement program is integral, the objective is
//! integral, and all bounds are finite, so a node is pruned as soon as the
//! floor of its relaxation bound cannot beat the incumbent. Branching picks
//! the most fractional variable, lowest index first, and explores the
//! rounded-up child before the rounded-down one.

use std::time::{Duration, Instant};

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use super::{SolveError, SolveOutcome, Status};
use crate::model::{MilpModel, Sense};

const INTEGRALITY_TOL: f64 = 1e-6;
const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ExactOptions {
    pub time_limit: Duration,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            time_limit: Duration::from_secs(300),
        }
    }
}

/// A `<=` row over variable indices.
#[derive(Debug, Clone)]
struct Row {
    terms: Vec<(usize, f64)>,
    rhs: f64,
    equality: bool,
}

struct Relaxation {
    rows: Vec<Row>,
    objective: Vec<f64>,
    integral: Vec<bool>,
}

pub fn solve_exact(model: &MilpModel, options: &ExactOptions) -> Result<SolveOutcome, SolveError> {
    let started = Instant::now();
    for v in model.variables() {
        if !(v.lower.is_finite() && v.upper.is_finite()) {
            return Err(SolveError::UnboundedVariable(v.name.clone()));
        }
    }
    let root: Vec<(f64, f64)> = model
        .variables()
        .iter()
        .map(|v| (v.lower, v.upper))
        .collect();
    let relaxation = Relaxation::new(model, &root);

    let mut incumbent: Option<(i64, Vec<f64>)> = None;
    let mut stack = vec![root];
    let mut nodes = 0u64;
    let mut timed_out = false;

    while let Some(bounds) = stack.pop() {
        if started.elapsed() >= options.time_limit {
            timed_out = true;
            break;
        }
        nodes += 1;
        let Some((bound, values)) = relaxation.solve(&bounds)? else {
            continue;
        };
        let best = incumbent.as_ref().map(|(v, _)| *v);
        if best.is_some_and(|b| (bound + INTEGRALITY_TOL).floor() as i64 <= b) {
            continue;
        }

        match relaxation.branching_variable(&values) {
            Some(var) => {
                let v = values[var];
                let mut down = bounds.clone();
                down[var].1 = v.floor();
                let mut up = bounds;
                up[var].0 = v.ceil();
                stack.push(down);
                stack.push(up);
            }
            None => {
                let rounded: Vec<f64> = values.iter().map(|v| v.round()).collect();
                let (rows, vars) = model.infeasibilities(&rounded, FEASIBILITY_TOL);
                if !rows.is_empty() || !vars.is_empty() {
                    // relaxation accepted a point that does not round cleanly
                    continue;
                }
                let score = relaxation.score(&rounded);
                if best.is_none_or(|b| score > b) {
                    incumbent = Some((score, rounded));
                }
            }
        }
    }

    let (_, values) = incumbent.ok_or(SolveError::NoIncumbent)?;
    Ok(SolveOutcome {
        solution: model.decode(&values),
        status: if timed_out {
            Status::Timeout
        } else {
            Status::Optimal
        },
        nodes_explored: nodes,
        wall_time: started.elapsed(),
    })
}

impl Relaxation {
    fn new(model: &MilpModel, root: &[(f64, f64)]) -> Self {
        let vars = model.variables();
        // primary servers break ties between equal savings
        let weight = model.layout.x.iter().map(|v| vars[v.0].upper).sum::<f64>() + 1.0;
        let mut objective: Vec<f64> = vars.iter().map(|v| weight * v.objective).collect();
        for x in &model.layout.x {
            objective[x.0] += 1.0;
        }

        let mut rows = Vec::with_capacity(model.constraints().len());
        for c in model.constraints() {
            let terms: Vec<(usize, f64)> = c.terms.iter().map(|&(v, a)| (v.0, a)).collect();
            let row = match c.sense {
                Sense::Le => tighten(
                    Row {
                        terms,
                        rhs: c.rhs,
                        equality: false,
                    },
                    root,
                    vars,
                ),
                Sense::Ge => tighten(
                    Row {
                        terms: terms.into_iter().map(|(v, a)| (v, -a)).collect(),
                        rhs: -c.rhs,
                        equality: false,
                    },
                    root,
                    vars,
                ),
                Sense::Eq => Row {
                    terms,
                    rhs: c.rhs,
                    equality: true,
                },
            };
            rows.push(row);
        }
        Relaxation {
            rows,
            objective,
            integral: vec![true; vars.len()],
        }
    }

    fn score(&self, values: &[f64]) -> i64 {
        self.objective
            .iter()
            .zip(values)
            .map(|(a, v)| a * v)
            .sum::<f64>()
            .round() as i64
    }

    /// `Ok(None)` when the node's relaxation is infeasible.
    fn solve(&self, bounds: &[(f64, f64)]) -> Result<Option<(f64, Vec<f64>)>, SolveError> {
        if bounds.iter().any(|&(lo, hi)| lo > hi) {
            return Ok(None);
        }
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = self
            .objective
            .iter()
            .zip(bounds)
            .map(|(&obj, &b)| lp.add_var(obj, b))
            .collect();
        for row in &self.rows {
            if row.terms.is_empty() {
                let ok = if row.equality {
                    row.rhs.abs() <= FEASIBILITY_TOL
                } else {
                    row.rhs >= -FEASIBILITY_TOL
                };
                if !ok {
                    return Ok(None);
                }
                continue;
            }
            let expr: Vec<_> = row.terms.iter().map(|&(v, a)| (vars[v], a)).collect();
            let op = if row.equality {
                ComparisonOp::Eq
            } else {
                ComparisonOp::Le
            };
            lp.add_constraint(expr.as_slice(), op, row.rhs);
        }
        match lp.solve() {
            Ok(outcome) => {
                let solution = outcome
                    .into_solution()
                    .map_err(|_| SolveError::Lp("relaxation interrupted".into()))?;
                let values = vars.iter().map(|&v| solution.var_value_raw(v)).collect();
                Ok(Some((solution.objective(), values)))
            }
            Err(microlp::Error::Infeasible) => Ok(None),
            Err(e) => Err(SolveError::Lp(e.to_string())),
        }
    }

    fn branching_variable(&self, values: &[f64]) -> Option<usize> {
        let mut pick = None;
        let mut widest = INTEGRALITY_TOL;
        for (i, &v) in values.iter().enumerate() {
            if !self.integral[i] {
                continue;
            }
            let frac = v - v.floor();
            let dist = frac.min(1.0 - frac);
            if dist > widest {
                widest = dist;
                pick = Some(i);
            }
        }
        pick
    }
}

/// Coefficient strengthening for binaries in `<=` rows: when one value of
/// the binary already makes the row redundant over the root bounds, its
/// coefficient is shrunk to the smallest value with the same integer
/// solutions. This turns `M·e ≥ c` into `ub(c)·e ≥ c`.
fn tighten(mut row: Row, root: &[(f64, f64)], vars: &[crate::model::Variable]) -> Row {
    use crate::model::VarKind;
    for p in 0..row.terms.len() {
        let (k, a) = row.terms[p];
        if vars[k].kind != VarKind::Binary || root[k] != (0.0, 1.0) {
            continue;
        }
        let rest: f64 = row
            .terms
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != p)
            .map(|(_, &(v, c))| {
                if c > 0.0 {
                    c * root[v].1
                } else {
                    c * root[v].0
                }
            })
            .sum();
        if a > 0.0 {
            // redundant at 0 when rest <= rhs - slack
            let d = row.rhs - rest;
            if d > 0.0 && d < a {
                row.terms[p].1 = a - d;
                row.rhs -= d;
            }
        } else if a < 0.0 {
            // redundant at 1 when rest + a <= rhs
            let d = row.rhs - (rest + a);
            if d > 0.0 {
                row.terms[p].1 = (a + d).min(0.0);
            }
        }
    }
    row
}
