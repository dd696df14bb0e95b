//! The placement integer program: parameters, instances, solutions, the
//! constraint families, the model builder and an independent checker.

mod bounds;
mod build;
mod check;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::failure::{build_independence_matrix, IndependenceMatrix};
use crate::paths::{compute_secondary_paths, SecondaryPathSet};
use crate::topology::Topology;

pub use bounds::{variable_bounds, VariableBounds};
pub use build::{build_model, Constraint, MilpModel, Sense, VarId, VarKind, Variable};
pub use check::{bandwidth_audit, check_solution, Violation};

/// Absolute slack allowed when comparing floating-point quantities
/// (latencies in ms, bandwidth in Mbps).
pub const TOLERANCE: f64 = 1e-9;

/// `floor(v)` that treats values within [`TOLERANCE`] below an integer as
/// that integer.
pub(crate) fn floor_tol(v: f64) -> i64 {
    (v + TOLERANCE).floor() as i64
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("alpha must lie in (0, 1], got {0}")]
    Alpha(f64),
    #[error("bandwidth_mbps must be positive and finite, got {0}")]
    Bandwidth(f64),
    #[error("lworst_ms must be non-negative and finite, got {0}")]
    Lworst(f64),
    #[error("umax must be positive")]
    Umax,
    #[error("big_m must be positive and finite, got {0}")]
    BigM(f64),
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
}

/// U_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SiteLimit {
    #[default]
    Unbounded,
    AtMost(u32),
}

impl Serialize for SiteLimit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SiteLimit::Unbounded => s.serialize_str("unbounded"),
            SiteLimit::AtMost(n) => s.serialize_u32(*n),
        }
    }
}

impl fmt::Display for SiteLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteLimit::Unbounded => f.write_str("unbounded"),
            SiteLimit::AtMost(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementParams {
    /// Fraction of each link direction reserved for replication.
    pub alpha: f64,
    /// Replication bandwidth per primary server.
    pub bandwidth_mbps: f64,
    /// Maximum latency of a replication link.
    pub lworst_ms: f64,
    pub umax: SiteLimit,
    /// Whether secondary paths are provisioned.
    pub use_secondary_paths: bool,
    pub big_m: f64,
}

pub const DEFAULT_BANDWIDTH_MBPS: f64 = 240.0;
pub const DEFAULT_BIG_M: f64 = 1e9;

impl PlacementParams {
    /// Defaults for everything except `alpha` and `lworst_ms`.
    pub fn new(alpha: f64, lworst_ms: f64) -> Self {
        PlacementParams {
            alpha,
            bandwidth_mbps: DEFAULT_BANDWIDTH_MBPS,
            lworst_ms,
            umax: SiteLimit::Unbounded,
            use_secondary_paths: true,
            big_m: DEFAULT_BIG_M,
        }
    }

    pub fn with_gamma(mut self, use_secondary_paths: bool) -> Self {
        self.use_secondary_paths = use_secondary_paths;
        self
    }

    pub fn with_bandwidth(mut self, mbps: f64) -> Self {
        self.bandwidth_mbps = mbps;
        self
    }

    pub fn gamma(&self) -> f64 {
        if self.use_secondary_paths {
            1.0
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ModelError::Alpha(self.alpha));
        }
        if !(self.bandwidth_mbps.is_finite() && self.bandwidth_mbps > 0.0) {
            return Err(ModelError::Bandwidth(self.bandwidth_mbps));
        }
        if !(self.lworst_ms.is_finite() && self.lworst_ms >= 0.0) {
            return Err(ModelError::Lworst(self.lworst_ms));
        }
        if self.umax == SiteLimit::AtMost(0) {
            return Err(ModelError::Umax);
        }
        if !(self.big_m.is_finite() && self.big_m > 0.0) {
            return Err(ModelError::BigM(self.big_m));
        }
        Ok(())
    }

    /// Maximum number of replications a link direction with capacity `w` can carry.
    pub fn replication_bound(&self, w: f64) -> i64 {
        if w <= 0.0 {
            return 0;
        }
        floor_tol(self.alpha * w / self.bandwidth_mbps)
    }
}

impl Serialize for PlacementParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PlacementParams", 6)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("bandwidth_mbps", &self.bandwidth_mbps)?;
        st.serialize_field("lworst_ms", &self.lworst_ms)?;
        st.serialize_field("umax", &self.umax)?;
        st.serialize_field("gamma", &u8::from(self.use_secondary_paths))?;
        st.serialize_field("big_m", &self.big_m)?;
        st.end()
    }
}

/// Everything a solver needs: topology, failure independence, secondary
/// paths and parameters, checked for mutual consistency.
#[derive(Debug, Clone)]
pub struct Instance {
    pub topology: Topology,
    pub independence: IndependenceMatrix,
    pub paths: SecondaryPathSet,
    pub params: PlacementParams,
}

impl Instance {
    pub fn new(
        topology: Topology,
        independence: IndependenceMatrix,
        paths: SecondaryPathSet,
        params: PlacementParams,
    ) -> Result<Self, ModelError> {
        params.validate()?;
        let ids: Vec<&str> = topology.sites().iter().map(|s| s.id.as_str()).collect();
        let order: Vec<&str> = independence.order().iter().map(String::as_str).collect();
        if ids != order {
            return Err(ModelError::Inconsistent(
                "independence matrix site order differs from topology".into(),
            ));
        }
        let pairs = topology.directed_pairs();
        if paths.len() != pairs.len() || pairs.iter().any(|&(k, m)| paths.get(k, m).is_none()) {
            return Err(ModelError::Inconsistent(
                "secondary paths do not cover the topology's linked pairs".into(),
            ));
        }
        Ok(Instance {
            topology,
            independence,
            paths,
            params,
        })
    }

    /// Runs the precomputation step: independence matrix and secondary paths.
    pub fn prepare(topology: Topology, params: PlacementParams) -> Result<Self, ModelError> {
        let independence = build_independence_matrix(&topology);
        let paths = compute_secondary_paths(&topology);
        Instance::new(topology, independence, paths, params)
    }

    pub fn with_params(&self, params: PlacementParams) -> Result<Self, ModelError> {
        params.validate()?;
        Ok(Instance {
            params,
            ..self.clone()
        })
    }

    pub fn len(&self) -> usize {
        self.topology.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topology.is_empty()
    }

    /// Upper bound on c_ij from bandwidth alone.
    pub fn c_bound(&self, i: usize, j: usize) -> i64 {
        self.params.replication_bound(self.topology.capacity(i, j))
    }

    /// Linked pair whose replication is ruled out because no secondary
    /// path can be provisioned.
    pub fn unprotectable(&self, i: usize, j: usize) -> bool {
        self.params.use_secondary_paths && self.paths.is_absent(i, j)
    }
}

/// Values for every variable of the program, dense over site indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementSolution {
    pub x: Vec<i64>,
    pub b: Vec<i64>,
    pub u: Vec<i64>,
    pub c: Vec<Vec<i64>>,
    pub e: Vec<Vec<i64>>,
    pub r: Vec<Vec<i64>>,
    /// y_kij for i < j; missing entries are zero.
    pub y: BTreeMap<(usize, usize, usize), i64>,
    pub objective: i64,
}

impl PlacementSolution {
    pub fn zeros(n: usize) -> Self {
        PlacementSolution {
            x: vec![0; n],
            b: vec![0; n],
            u: vec![0; n],
            c: vec![vec![0; n]; n],
            e: vec![vec![0; n]; n],
            r: vec![vec![0; n]; n],
            y: BTreeMap::new(),
            objective: 0,
        }
    }

    /// Completes a replication matrix into a full assignment: x from the
    /// row sums, b as the column maxima, e/u/y as indicators and r as the
    /// largest integer bandwidth left after secondary-path reservations.
    pub fn derive(instance: &Instance, c: Vec<Vec<i64>>) -> Self {
        let n = instance.len();
        let topo = &instance.topology;
        let params = &instance.params;
        let mut s = PlacementSolution::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let v = c[i][j];
                s.x[i] += v;
                s.b[j] = s.b[j].max(v);
                s.e[i][j] = i64::from(v > 0);
            }
        }
        for i in 0..n {
            s.u[i] = i64::from(s.x[i] + s.b[i] > 0);
        }
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    if s.e[i][k] == 1 && s.e[j][k] == 1 {
                        s.y.insert((k, i, j), 1);
                    }
                }
            }
        }
        for (i, j) in topo.directed_pairs() {
            let reserved = instance
                .paths
                .pairs_through(i, j)
                .iter()
                .map(|&(k, m)| c[k][m])
                .max()
                .unwrap_or(0) as f64;
            let limit = params.alpha * topo.capacity(i, j)
                - params.gamma() * params.bandwidth_mbps * reserved;
            s.r[i][j] = floor_tol(limit);
        }
        s.c = c;
        s.objective = s.total_primary() - s.total_backup();
        s
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn total_primary(&self) -> i64 {
        self.x.iter().sum()
    }

    pub fn total_backup(&self) -> i64 {
        self.b.iter().sum()
    }

    pub fn active_sites(&self) -> i64 {
        self.u.iter().sum()
    }

    /// Ordered pairs with c_ij > 0, sorted.
    pub fn replications(&self) -> Vec<(usize, usize, i64)> {
        let mut out = Vec::new();
        for (i, row) in self.c.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > 0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// Constraint families of the program, named by role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// c_ij · I_ij = 0
    FailureIndependence,
    /// Σ_j c_ij = x_i
    BackupAssignment,
    /// M · e_ij − c_ij ≥ 0
    ReplicationIndicatorUpper,
    /// e_ij ≤ c_ij
    ReplicationIndicatorLower,
    /// y_kij ≥ e_ik + e_jk − 1
    SharingIndicatorLower,
    /// y_kij ≤ e_ik
    SharingIndicatorFirst,
    /// y_kij ≤ e_jk
    SharingIndicatorSecond,
    /// Σ_{i<j} I_ij · y_kij = 0
    SharingExclusion,
    /// b_j − c_ij ≥ 0
    BackupCoverage,
    /// B · c_ij ≤ r_ij
    BandwidthDemand,
    /// r_ij ≤ α · W_ij − γ · B · c_km · s^km_ij
    BandwidthReservation,
    /// e_ij · Δ_ij ≤ L_worst
    LatencyLimit,
    /// M · u_i − (x_i + b_i) ≥ 0
    ActiveSiteUpper,
    /// u_i ≤ x_i + b_i
    ActiveSiteLower,
    /// Σ u_i ≤ U_max
    ActiveSiteLimit,
    /// Sign and integrality of every variable.
    Domain,
    /// Reported objective equals Σ (x_i − b_i).
    Objective,
    /// Replication over a link without a secondary path while γ = 1.
    UnprotectedReplication,
}

impl Family {
    /// Families with one row group each in the built model.
    pub const MODEL_FAMILIES: [Family; 15] = [
        Family::FailureIndependence,
        Family::BackupAssignment,
        Family::ReplicationIndicatorUpper,
        Family::ReplicationIndicatorLower,
        Family::SharingIndicatorLower,
        Family::SharingIndicatorFirst,
        Family::SharingIndicatorSecond,
        Family::SharingExclusion,
        Family::BackupCoverage,
        Family::BandwidthDemand,
        Family::BandwidthReservation,
        Family::LatencyLimit,
        Family::ActiveSiteUpper,
        Family::ActiveSiteLower,
        Family::ActiveSiteLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::FailureIndependence => "failure_independence",
            Family::BackupAssignment => "backup_assignment",
            Family::ReplicationIndicatorUpper => "replication_indicator_upper",
            Family::ReplicationIndicatorLower => "replication_indicator_lower",
            Family::SharingIndicatorLower => "sharing_indicator_lower",
            Family::SharingIndicatorFirst => "sharing_indicator_first",
            Family::SharingIndicatorSecond => "sharing_indicator_second",
            Family::SharingExclusion => "sharing_exclusion",
            Family::BackupCoverage => "backup_coverage",
            Family::BandwidthDemand => "bandwidth_demand",
            Family::BandwidthReservation => "bandwidth_reservation",
            Family::LatencyLimit => "latency_limit",
            Family::ActiveSiteUpper => "active_site_upper",
            Family::ActiveSiteLower => "active_site_lower",
            Family::ActiveSiteLimit => "active_site_limit",
            Family::Domain => "domain",
            Family::Objective => "objective",
            Family::UnprotectedReplication => "unprotected_replication",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
