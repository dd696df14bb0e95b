//! Serialized run reports and sweep tables.
//!
//! Reports are plain JSON with a fixed key order and no timing data, so two
//! runs on the same inputs produce the same bytes.

use std::io;
use std::path::Path;

use serde::Serialize;

use crate::metrics::{capacity_reduction, secondary_latency_stats, server_efficiency, Metric};
use crate::model::{Instance, PlacementParams, PlacementSolution};
use crate::solver::Status;

#[derive(Debug, Clone, Serialize)]
pub struct Totals {
    pub primary: i64,
    pub backup: i64,
    pub active_sites: i64,
    pub objective: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SitePlacement {
    pub site: String,
    pub x: i64,
    pub b: i64,
}

/// Latency of a secondary path, or `ABSENT` when none exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathLatency {
    Ms(f64),
    Absent,
}

impl Serialize for PathLatency {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PathLatency::Ms(v) => s.serialize_f64(*v),
            PathLatency::Absent => s.serialize_str("ABSENT"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Replication {
    pub from: String,
    pub to: String,
    pub count: i64,
    pub link_latency_ms: f64,
    pub secondary_latency_ms: PathLatency,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub params: PlacementParams,
    pub status: Status,
    pub totals: Totals,
    pub server_efficiency: Metric,
    pub placement: Vec<SitePlacement>,
    pub replications: Vec<Replication>,
    pub secondary_cdf: Vec<(f64, f64)>,
}

impl RunReport {
    pub fn new(instance: &Instance, solution: &PlacementSolution, status: Status) -> Self {
        let topo = &instance.topology;
        let placement = (0..solution.len())
            .map(|i| SitePlacement {
                site: topo.site_id(i).to_string(),
                x: solution.x[i],
                b: solution.b[i],
            })
            .collect();
        let replications = solution
            .replications()
            .into_iter()
            .map(|(i, j, count)| Replication {
                from: topo.site_id(i).to_string(),
                to: topo.site_id(j).to_string(),
                count,
                link_latency_ms: topo.latency(i, j).unwrap_or(f64::INFINITY),
                secondary_latency_ms: match instance.paths.get(i, j).flatten() {
                    Some(p) => PathLatency::Ms(p.latency_ms),
                    None => PathLatency::Absent,
                },
            })
            .collect();
        RunReport {
            params: instance.params.clone(),
            status,
            totals: Totals {
                primary: solution.total_primary(),
                backup: solution.total_backup(),
                active_sites: solution.active_sites(),
                objective: solution.objective,
            },
            server_efficiency: server_efficiency(solution),
            placement,
            replications,
            secondary_cdf: secondary_latency_stats(solution, &instance.paths).cdf(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Writes `report` to `destination`, creating parent directories.
pub fn emit_report(report: &RunReport, destination: &Path) -> io::Result<()> {
    if let Some(parent) = destination.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(destination, report.to_json())
}

/// How a sweep cell ended.
#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Solved {
        status: Status,
        total_primary: i64,
        total_backup: i64,
        server_efficiency: Metric,
    },
    /// The cell produced no usable solution; the label goes in the status column.
    Failed(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub alpha: f64,
    pub lworst_ms: f64,
    pub use_secondary_paths: bool,
    pub outcome: CellOutcome,
}

impl SweepCell {
    pub fn from_report(report: &RunReport) -> Self {
        SweepCell {
            alpha: report.params.alpha,
            lworst_ms: report.params.lworst_ms,
            use_secondary_paths: report.params.use_secondary_paths,
            outcome: CellOutcome::Solved {
                status: report.status,
                total_primary: report.totals.primary,
                total_backup: report.totals.backup,
                server_efficiency: report.server_efficiency,
            },
        }
    }

    fn optimal_primary(&self) -> Option<i64> {
        match self.outcome {
            CellOutcome::Solved {
                status: Status::Optimal,
                total_primary,
                ..
            } => Some(total_primary),
            _ => None,
        }
    }
}

/// Cells of a parameter sweep, in grid order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    /// True when the grid holds cells for both γ values, which is when the
    /// capacity reduction column is emitted.
    pub fn pairs_gamma(&self) -> bool {
        self.cells.iter().any(|c| c.use_secondary_paths)
            && self.cells.iter().any(|c| !c.use_secondary_paths)
    }

    /// `1 − S/S′` for the (α, L_worst) of `cell`, pairing its γ = 1 and
    /// γ = 0 cells. Applicable only when both are optimal.
    pub fn capacity_reduction_for(&self, cell: &SweepCell) -> Metric {
        let find = |gamma: bool| {
            self.cells.iter().find(|c| {
                c.alpha == cell.alpha
                    && c.lworst_ms == cell.lworst_ms
                    && c.use_secondary_paths == gamma
            })
        };
        match (
            find(true).and_then(SweepCell::optimal_primary),
            find(false).and_then(SweepCell::optimal_primary),
        ) {
            (Some(s), Some(s_prime)) => capacity_reduction(s, s_prime),
            _ => Metric::NotApplicable,
        }
    }

    pub fn to_csv(&self) -> String {
        let with_reduction = self.pairs_gamma();
        let mut out = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "alpha",
            "lworst_ms",
            "gamma",
            "total_primary",
            "total_backup",
            "server_efficiency",
            "status",
        ];
        if with_reduction {
            header.push("capacity_reduction");
        }
        out.write_record(&header).expect("in-memory write");
        for cell in &self.cells {
            let mut row = vec![
                cell.alpha.to_string(),
                cell.lworst_ms.to_string(),
                u8::from(cell.use_secondary_paths).to_string(),
            ];
            match &cell.outcome {
                CellOutcome::Solved {
                    status,
                    total_primary,
                    total_backup,
                    server_efficiency,
                } => {
                    row.push(total_primary.to_string());
                    row.push(total_backup.to_string());
                    row.push(server_efficiency.to_fixed());
                    row.push(status.to_string());
                }
                CellOutcome::Failed(label) => {
                    row.extend([
                        String::new(),
                        String::new(),
                        Metric::NotApplicable.to_fixed(),
                    ]);
                    row.push(label.to_string());
                }
            }
            if with_reduction {
                row.push(self.capacity_reduction_for(cell).to_fixed());
            }
            out.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(out.into_inner().expect("in-memory flush")).expect("ascii csv")
    }
}
