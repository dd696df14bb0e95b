//! Evaluation quantities computed from a placement.

use std::fmt;

use serde::Serialize;

use crate::model::{PlacementSolution, TOLERANCE};
use crate::paths::SecondaryPathSet;

/// A fraction that may be undefined for the run at hand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Value(f64),
    NotApplicable,
}

impl Metric {
    pub fn value(self) -> Option<f64> {
        match self {
            Metric::Value(v) => Some(v),
            Metric::NotApplicable => None,
        }
    }

    /// Four decimal digits, or `NOT-APPLICABLE`.
    pub fn to_fixed(self) -> String {
        match self {
            Metric::Value(v) => format!("{v:.4}"),
            Metric::NotApplicable => "NOT-APPLICABLE".to_string(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Value(v) => write!(f, "{v}"),
            Metric::NotApplicable => f.write_str("NOT-APPLICABLE"),
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Metric::Value(v) => s.serialize_f64(*v),
            Metric::NotApplicable => s.serialize_str("NOT-APPLICABLE"),
        }
    }
}

/// `1 − Σb / Σx`: the share of backup servers saved against one dedicated
/// backup per primary. Undefined when no primary server is placed.
pub fn server_efficiency(solution: &PlacementSolution) -> Metric {
    let primary = solution.total_primary();
    if primary <= 0 {
        return Metric::NotApplicable;
    }
    Metric::Value(1.0 - solution.total_backup() as f64 / primary as f64)
}

/// `1 − S / S′`, where `S` is the primary count with secondary paths
/// provisioned and `S′` the count without. Undefined when `S′ = 0`.
pub fn capacity_reduction(with_paths: i64, without_paths: i64) -> Metric {
    if without_paths <= 0 {
        return Metric::NotApplicable;
    }
    Metric::Value(1.0 - with_paths as f64 / without_paths as f64)
}

/// Secondary-path latencies of the pairs that actually replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondaryLatencyStats {
    /// Ascending.
    pub samples: Vec<f64>,
    /// Replicating pairs with no secondary path; not part of `samples`.
    pub absent_pairs: Vec<(usize, usize)>,
}

impl SecondaryLatencyStats {
    /// Empirical CDF as `(latency, fraction of samples ≤ latency)` at each
    /// distinct sample value.
    pub fn cdf(&self) -> Vec<(f64, f64)> {
        let n = self.samples.len() as f64;
        let mut points: Vec<(f64, f64)> = Vec::new();
        for (pos, &v) in self.samples.iter().enumerate() {
            let frac = (pos + 1) as f64 / n;
            match points.last_mut() {
                Some(last) if last.0 == v => last.1 = frac,
                _ => points.push((v, frac)),
            }
        }
        points
    }

    /// Share of samples whose latency is within `lworst_ms`.
    pub fn fraction_meeting(&self, lworst_ms: f64) -> Metric {
        if self.samples.is_empty() {
            return Metric::NotApplicable;
        }
        let meeting = self
            .samples
            .iter()
            .filter(|&&v| v <= lworst_ms + TOLERANCE)
            .count();
        Metric::Value(meeting as f64 / self.samples.len() as f64)
    }
}

pub fn secondary_latency_stats(
    solution: &PlacementSolution,
    paths: &SecondaryPathSet,
) -> SecondaryLatencyStats {
    let mut samples = Vec::new();
    let mut absent_pairs = Vec::new();
    for (i, j, _) in solution.replications() {
        match paths.get(i, j).flatten() {
            Some(p) => samples.push(p.latency_ms),
            None => absent_pairs.push((i, j)),
        }
    }
    samples.sort_by(f64::total_cmp);
    SecondaryLatencyStats {
        samples,
        absent_pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_totals(x: &[i64], b: &[i64]) -> PlacementSolution {
        let mut s = PlacementSolution::zeros(x.len());
        s.x = x.to_vec();
        s.b = b.to_vec();
        s
    }

    #[test]
    fn efficiency_arithmetic() {
        let s = with_totals(&[4, 6], &[3, 3]);
        assert!((server_efficiency(&s).value().unwrap() - 0.4).abs() < 1e-12);
        let dedicated = with_totals(&[2, 3], &[3, 2]);
        assert_eq!(server_efficiency(&dedicated), Metric::Value(0.0));
        let shared = with_totals(&[5, 0], &[0, 1]);
        assert!((server_efficiency(&shared).value().unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn efficiency_without_primaries_is_not_applicable() {
        assert_eq!(
            server_efficiency(&PlacementSolution::zeros(3)),
            Metric::NotApplicable
        );
    }

    #[test]
    fn capacity_reduction_arithmetic() {
        assert_eq!(capacity_reduction(5, 10), Metric::Value(0.5));
        assert_eq!(capacity_reduction(7, 7), Metric::Value(0.0));
        assert_eq!(capacity_reduction(0, 4), Metric::Value(1.0));
        assert_eq!(capacity_reduction(0, 0), Metric::NotApplicable);
    }

    #[test]
    fn fraction_meeting_latency_limit() {
        let one = SecondaryLatencyStats {
            samples: vec![3.0],
            absent_pairs: vec![],
        };
        assert_eq!(one.fraction_meeting(1.3), Metric::Value(0.0));
        let two = SecondaryLatencyStats {
            samples: vec![1.0, 2.0],
            absent_pairs: vec![],
        };
        assert_eq!(two.fraction_meeting(1.3), Metric::Value(0.5));
        let none = SecondaryLatencyStats {
            samples: vec![],
            absent_pairs: vec![(0, 1)],
        };
        assert_eq!(none.fraction_meeting(1.3), Metric::NotApplicable);
        assert!(none.cdf().is_empty());
    }

    #[test]
    fn cdf_merges_repeated_samples() {
        let s = SecondaryLatencyStats {
            samples: vec![1.0, 1.0, 2.0, 4.0],
            absent_pairs: vec![],
        };
        assert_eq!(s.cdf(), vec![(1.0, 0.5), (2.0, 0.75), (4.0, 1.0)]);
    }

    #[test]
    fn serializes_not_applicable_as_string() {
        assert_eq!(
            serde_json::to_string(&Metric::NotApplicable).unwrap(),
            "\"NOT-APPLICABLE\""
        );
        assert_eq!(serde_json::to_string(&Metric::Value(0.25)).unwrap(), "0.25");
        assert_eq!(Metric::Value(1.0 / 3.0).to_fixed(), "0.3333");
    }
}
