//! Placement of primary and shared backup servers across a WAN of
//! candidate data-center sites.
//!
//! The pipeline has two steps. First, the failure-independence matrix and
//! the secondary path of every replication link are precomputed from the
//! topology ([`failure`], [`paths`]). Second, an integer program chooses how
//! many primary servers each site hosts and where their backups go, such
//! that backups never fail together with their primaries and a single
//! backup server can cover several primaries that never fail together
//! ([`model`], [`solver`]). [`metrics`] computes evaluation quantities and
//! [`report`] serializes runs.

#![allow(clippy::needless_range_loop)]

pub mod failure;
pub mod metrics;
pub mod model;
pub mod paths;
pub mod report;
pub mod solver;
pub mod topology;

pub use failure::{build_independence_matrix, unreachable_sites, FailureEvent, IndependenceMatrix};
pub use model::{
    build_model, check_solution, variable_bounds, Instance, MilpModel, PlacementParams,
    PlacementSolution, SiteLimit,
};
pub use paths::{compute_secondary_paths, path_latency, SecondaryPath, SecondaryPathSet};
pub use solver::{
    brute_force_oracle, solve_exact, solve_greedy, ExactOptions, SolveOutcome, Status,
};
pub use topology::{derive_latency, load_topology, Link, Site, Topology};
