//! The `drplan` command line: `place`, `sweep` and `inspect`.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 when the solver stops
//! at its time limit without any feasible placement, 4 when a returned
//! placement fails the independent checker.

pub mod args;

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use anyhow::Context;
use rayon::prelude::*;

use drplan_core::model::{variable_bounds, Instance, PlacementParams};
use drplan_core::report::{emit_report, CellOutcome, RunReport, SweepCell, SweepResult};
use drplan_core::solver::{SolveError, SolveOutcome};
use drplan_core::{
    brute_force_oracle, build_model, check_solution, load_topology, solve_exact, solve_greedy,
    ExactOptions,
};

pub use args::{Cli, Command};
use args::{CommonArgs, Gamma, InspectArgs, InspectTarget, PlaceArgs, SolverChoice, SweepArgs};

pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_NO_INCUMBENT: u8 = 3;
pub const EXIT_CHECK_FAILED: u8 = 4;

/// A failed command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_INVALID_INPUT,
            error: error.into(),
        }
    }

    fn label(&self) -> &'static str {
        match self.code {
            EXIT_NO_INCUMBENT => "NO_INCUMBENT",
            EXIT_CHECK_FAILED => "CHECK_FAILED",
            _ => "INVALID_INPUT",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Place(args) => cmd_place(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Inspect(args) => cmd_inspect(&args),
    }
}

fn params_for(common: &CommonArgs, alpha: f64, lworst_ms: f64, gamma: Gamma) -> PlacementParams {
    let mut params = PlacementParams::new(alpha, lworst_ms)
        .with_bandwidth(common.bandwidth_mbps)
        .with_gamma(gamma.0);
    params.umax = common.umax.0;
    params
}

fn prepare(common: &CommonArgs, params: PlacementParams) -> Result<Instance, Failure> {
    let topology = load_topology(&common.topology).map_err(Failure::invalid)?;
    Instance::prepare(topology, params).map_err(Failure::invalid)
}

/// Runs the chosen solver and validates its answer.
fn solve(common: &CommonArgs, instance: &Instance) -> Result<(RunReport, String), Failure> {
    let model = build_model(instance);
    let outcome: SolveOutcome = match common.solver {
        SolverChoice::Exact => {
            let options = ExactOptions {
                time_limit: Duration::from_secs(common.time_limit_s),
            };
            solve_exact(&model, &options).map_err(|e| match e {
                SolveError::NoIncumbent => Failure {
                    code: EXIT_NO_INCUMBENT,
                    error: e.into(),
                },
                other => Failure::invalid(other),
            })?
        }
        SolverChoice::Greedy => solve_greedy(&model),
        SolverChoice::Oracle => {
            brute_force_oracle(instance, common.oracle_max_c).map_err(Failure::invalid)?
        }
    };
    let violations = check_solution(&outcome.solution, instance);
    if !violations.is_empty() {
        let listing: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Failure {
            code: EXIT_CHECK_FAILED,
            error: anyhow::anyhow!(
                "solver returned a placement with {} violation(s):\n  {}",
                violations.len(),
                listing.join("\n  ")
            ),
        });
    }
    Ok((
        RunReport::new(instance, &outcome.solution, outcome.status),
        model.to_lp(),
    ))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .with_context(|| format!("cannot create {}", parent.display()))
                    .map_err(Failure::invalid)?;
            }
            std::fs::write(path, text)
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(Failure::invalid)
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .context("cannot write to standard output")
                .map_err(Failure::invalid)
        }
    }
}

pub fn cmd_place(args: &PlaceArgs) -> Result<(), Failure> {
    let params = params_for(&args.common, args.alpha, args.lworst_ms, args.gamma);
    let instance = prepare(&args.common, params)?;
    let (report, lp) = solve(&args.common, &instance)?;
    if let Some(path) = &args.model_out {
        write_output(Some(path), &lp)?;
    }
    write_output(args.out.as_deref(), &report.to_json())
}

/// File name of a sweep cell's report.
pub fn cell_file_name(index: usize, alpha: f64, lworst_ms: f64, gamma: bool) -> String {
    format!(
        "cell-{index:03}_alpha-{alpha}_lworst-{lworst_ms}_gamma-{}.json",
        u8::from(gamma)
    )
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let mut grid = Vec::new();
    for &alpha in &args.alpha_list {
        for &lworst in &args.lworst_list {
            for &gamma in &args.gamma_list {
                grid.push((alpha, lworst, gamma));
            }
        }
    }
    // validate every cell before spending time on any solve
    for &(alpha, lworst, gamma) in &grid {
        params_for(&args.common, alpha, lworst, gamma)
            .validate()
            .map_err(Failure::invalid)?;
    }
    let (alpha0, lworst0, gamma0) = grid[0];
    let base = prepare(
        &args.common,
        params_for(&args.common, alpha0, lworst0, gamma0),
    )?;

    let results: Vec<(SweepCell, Option<RunReport>, Option<Failure>)> = grid
        .par_iter()
        .map(|&(alpha, lworst, gamma)| {
            let params = params_for(&args.common, alpha, lworst, gamma);
            let attempt = base
                .with_params(params)
                .map_err(Failure::invalid)
                .and_then(|instance| solve(&args.common, &instance));
            match attempt {
                Ok((report, _)) => (SweepCell::from_report(&report), Some(report), None),
                Err(failure) => {
                    let cell = SweepCell {
                        alpha,
                        lworst_ms: lworst,
                        use_secondary_paths: gamma.0,
                        outcome: CellOutcome::Failed(failure.label()),
                    };
                    (cell, None, Some(failure))
                }
            }
        })
        .collect();

    let mut worst: Option<Failure> = None;
    let mut sweep = SweepResult::default();
    for (index, (cell, report, failure)) in results.into_iter().enumerate() {
        if let (Some(dir), Some(report)) = (&args.out, &report) {
            let name = cell_file_name(index, cell.alpha, cell.lworst_ms, cell.use_secondary_paths);
            emit_report(report, &dir.join(name))
                .with_context(|| format!("cannot write report into {}", dir.display()))
                .map_err(Failure::invalid)?;
        }
        if let Some(failure) = failure {
            eprintln!(
                "cell {index} (alpha={}, lworst_ms={}, gamma={}): {failure}",
                cell.alpha,
                cell.lworst_ms,
                u8::from(cell.use_secondary_paths)
            );
            if worst.as_ref().is_none_or(|w| failure.code > w.code) {
                worst = Some(failure);
            }
        }
        sweep.cells.push(cell);
    }
    write_output(args.csv.as_deref(), &sweep.to_csv())?;
    match worst {
        Some(failure) => Err(failure),
        None => Ok(()),
    }
}

pub fn cmd_inspect(args: &InspectArgs) -> Result<(), Failure> {
    let topology = load_topology(&args.topology).map_err(Failure::invalid)?;
    let text = match args.what {
        InspectTarget::Matrix => drplan_core::build_independence_matrix(&topology).to_csv(),
        InspectTarget::Paths => drplan_core::compute_secondary_paths(&topology).dump(&topology),
        InspectTarget::Bounds => {
            let alpha = args
                .alpha
                .ok_or_else(|| Failure::invalid(anyhow::anyhow!("inspect bounds needs --alpha")))?;
            // latency plays no part in the bounds
            let params = PlacementParams::new(alpha, 0.0).with_bandwidth(args.bandwidth_mbps);
            params.validate().map_err(Failure::invalid)?;
            variable_bounds(&topology, &params).dump(&topology)
        }
    };
    write_output(None, &text)
}
