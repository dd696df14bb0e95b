use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{floor_tol, PlacementParams};
use crate::topology::Topology;

/// Finite upper bounds for the integer variables. Lower bounds are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableBounds {
    pub x: Vec<i64>,
    pub b: Vec<i64>,
    pub c: BTreeMap<(usize, usize), i64>,
    pub r: BTreeMap<(usize, usize), i64>,
}

pub fn variable_bounds(topology: &Topology, params: &PlacementParams) -> VariableBounds {
    let n = topology.len();
    let mut bounds = VariableBounds {
        x: vec![0; n],
        b: vec![0; n],
        c: BTreeMap::new(),
        r: BTreeMap::new(),
    };
    for (i, j) in topology.directed_pairs() {
        let w = topology.capacity(i, j);
        let c = params.replication_bound(w);
        bounds.c.insert((i, j), c);
        bounds.r.insert((i, j), floor_tol(params.alpha * w));
        bounds.x[i] += c;
        bounds.b[j] = bounds.b[j].max(c);
    }
    bounds
}

impl VariableBounds {
    /// c bound for any ordered pair; zero when the sites are not linked.
    pub fn c_bound(&self, i: usize, j: usize) -> i64 {
        self.c.get(&(i, j)).copied().unwrap_or(0)
    }

    /// CSV with header `variable,site_i,site_j,upper_bound`.
    pub fn dump(&self, topology: &Topology) -> String {
        let mut out = String::from("variable,site_i,site_j,upper_bound\n");
        for (i, v) in self.x.iter().enumerate() {
            let _ = writeln!(out, "x,{},,{v}", topology.site_id(i));
        }
        for (i, v) in self.b.iter().enumerate() {
            let _ = writeln!(out, "b,{},,{v}", topology.site_id(i));
        }
        for (name, map) in [("c", &self.c), ("r", &self.r)] {
            for (&(i, j), v) in map {
                let _ = writeln!(
                    out,
                    "{name},{},{},{v}",
                    topology.site_id(i),
                    topology.site_id(j)
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> Topology {
        // H linked to A and B; A-B not linked
        Topology::from_json(
            r#"{"name": "s", "sites": [
                {"id": "H", "gateway": true}, {"id": "A", "gateway": true}, {"id": "B", "gateway": true}],
                "links": [
                  {"a": "H", "b": "A", "capacity_mbps": 10000, "latency_ms": 1},
                  {"a": "H", "b": "B", "capacity_mbps": 10000, "latency_ms": 1}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn c_bound_from_alpha_capacity_and_bandwidth() {
        let b = variable_bounds(&star(), &PlacementParams::new(0.05, 1.3));
        // floor(0.05 * 10000 / 240) = floor(500 / 240)
        assert_eq!(b.c_bound(0, 1), 2);
        assert_eq!(b.r[&(0, 1)], 500);
    }

    #[test]
    fn unlinked_pair_has_zero_bound() {
        let b = variable_bounds(&star(), &PlacementParams::new(0.05, 1.3));
        assert_eq!(b.c_bound(1, 2), 0);
    }

    #[test]
    fn x_bound_sums_incident_links() {
        let b = variable_bounds(&star(), &PlacementParams::new(0.05, 1.3));
        assert_eq!(b.x, vec![4, 2, 2]);
        assert_eq!(b.b, vec![2, 2, 2]);
    }

    #[test]
    fn exact_multiples_are_not_lost_to_rounding() {
        // 0.58 * 12000 / 240 evaluates to 28.999999999999996
        let p = PlacementParams::new(0.58, 1.3);
        assert_eq!(p.replication_bound(12000.0), 29);
    }

    #[test]
    fn dump_rows() {
        let t = star();
        let dump = variable_bounds(&t, &PlacementParams::new(0.05, 1.3)).dump(&t);
        assert!(dump.starts_with("variable,site_i,site_j,upper_bound\n"));
        assert!(dump.contains("\nc,H,A,2\n"));
        assert!(dump.contains("\nx,H,,4\n"));
    }
}
