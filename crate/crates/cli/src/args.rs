use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drplan_core::model::{SiteLimit, DEFAULT_BANDWIDTH_MBPS};

/// Places primary and shared backup servers across a WAN so that
/// replication survives any single site or link failure.
#[derive(Parser, Debug)]
#[command(name = "drplan", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one instance and write its report
    Place(PlaceArgs),
    /// Solve every cell of an (alpha, lworst, gamma) grid
    Sweep(SweepArgs),
    /// Dump a precomputed input to standard output
    Inspect(InspectArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Topology file (JSON)
    #[arg(long, value_name = "PATH")]
    pub topology: PathBuf,

    /// Replication bandwidth per primary server, in Mbps
    #[arg(long, default_value_t = DEFAULT_BANDWIDTH_MBPS)]
    pub bandwidth_mbps: f64,

    /// Maximum number of active sites: a positive integer or "unbounded"
    #[arg(long, default_value = "unbounded")]
    pub umax: Umax,

    #[arg(long, value_enum, default_value_t = SolverChoice::Exact)]
    pub solver: SolverChoice,

    /// Wall-clock limit for the exact solver, per instance
    #[arg(long, default_value_t = 300)]
    pub time_limit_s: u64,

    /// Largest replication count per pair the oracle enumerates
    #[arg(long, default_value_t = 2)]
    pub oracle_max_c: i64,
}

#[derive(Args, Debug)]
pub struct PlaceArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Fraction of each link direction reserved for replication
    #[arg(long)]
    pub alpha: f64,

    /// Maximum latency of a replication link, in ms
    #[arg(long)]
    pub lworst_ms: f64,

    /// 1 to provision secondary paths, 0 to skip them
    #[arg(long, default_value = "1")]
    pub gamma: Gamma,

    /// Report destination; standard output when absent
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Also write the integer program in LP format
    #[arg(long, value_name = "PATH")]
    pub model_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub alpha_list: Vec<f64>,

    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub lworst_list: Vec<f64>,

    #[arg(long, value_delimiter = ',', default_value = "1", num_args = 1..)]
    pub gamma_list: Vec<Gamma>,

    /// Directory receiving one JSON report per cell
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Sweep table destination; standard output when absent
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    #[arg(value_enum)]
    pub what: InspectTarget,

    /// Topology file (JSON)
    #[arg(long, value_name = "PATH")]
    pub topology: PathBuf,

    /// Needed for bounds
    #[arg(long)]
    pub alpha: Option<f64>,

    #[arg(long, default_value_t = DEFAULT_BANDWIDTH_MBPS)]
    pub bandwidth_mbps: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Exact,
    Greedy,
    Oracle,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum InspectTarget {
    Matrix,
    Paths,
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gamma(pub bool);

impl FromStr for Gamma {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "0" => Ok(Gamma(false)),
            "1" => Ok(Gamma(true)),
            other => Err(format!("gamma must be 0 or 1, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Umax(pub SiteLimit);

impl FromStr for Umax {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("unbounded") {
            return Ok(Umax(SiteLimit::Unbounded));
        }
        match s.parse::<u32>() {
            Ok(n) if n > 0 => Ok(Umax(SiteLimit::AtMost(n))),
            _ => Err(format!(
                "umax must be a positive integer or \"unbounded\", got {s:?}"
            )),
        }
    }
}
