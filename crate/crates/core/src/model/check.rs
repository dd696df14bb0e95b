//! Independent verification of a candidate placement against every
//! constraint family, evaluated over all site pairs and triples rather than
//! over the model's sparse variable set.

use std::fmt;

use super::{Family, Instance, PlacementSolution, SiteLimit, TOLERANCE};

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub family: Family,
    /// Site ids the violated instance is indexed by, e.g. `i=A,j=B`.
    pub indices: String,
    pub lhs: f64,
    pub sense: &'static str,
    pub rhs: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}]: {} {} {} does not hold",
            self.family, self.indices, self.lhs, self.sense, self.rhs
        )
    }
}

struct Collector<'a> {
    instance: &'a Instance,
    out: Vec<Violation>,
}

impl Collector<'_> {
    fn id(&self, i: usize) -> &str {
        self.instance.topology.site_id(i)
    }

    fn push(&mut self, family: Family, indices: String, lhs: f64, sense: &'static str, rhs: f64) {
        self.out.push(Violation {
            family,
            indices,
            lhs,
            sense,
            rhs,
        });
    }

    fn le(&mut self, family: Family, indices: impl FnOnce(&Self) -> String, lhs: f64, rhs: f64) {
        if lhs > rhs + TOLERANCE {
            let idx = indices(self);
            self.push(family, idx, lhs, "<=", rhs);
        }
    }

    fn eq(&mut self, family: Family, indices: impl FnOnce(&Self) -> String, lhs: f64, rhs: f64) {
        if (lhs - rhs).abs() > TOLERANCE {
            let idx = indices(self);
            self.push(family, idx, lhs, "=", rhs);
        }
    }

    fn ij(&self, i: usize, j: usize) -> String {
        format!("i={},j={}", self.id(i), self.id(j))
    }
}

/// All violated constraint instances; empty iff the solution is feasible.
pub fn check_solution(solution: &PlacementSolution, instance: &Instance) -> Vec<Violation> {
    let n = instance.len();
    let mut col = Collector {
        instance,
        out: Vec::new(),
    };

    let square = |m: &Vec<Vec<i64>>| m.len() == n && m.iter().all(|r| r.len() == n);
    if solution.x.len() != n
        || solution.b.len() != n
        || solution.u.len() != n
        || !square(&solution.c)
        || !square(&solution.e)
        || !square(&solution.r)
    {
        col.push(
            Family::Domain,
            "dimensions".into(),
            solution.x.len() as f64,
            "=",
            n as f64,
        );
        return col.out;
    }

    let topo = &instance.topology;
    let indep = &instance.independence;
    let params = &instance.params;
    let s = solution;
    let big_m = params.big_m;

    // domains
    for i in 0..n {
        if s.x[i] < 0 {
            col.push(
                Family::Domain,
                format!("x,i={}", col.id(i)),
                s.x[i] as f64,
                ">=",
                0.0,
            );
        }
        if s.b[i] < 0 {
            col.push(
                Family::Domain,
                format!("b,i={}", col.id(i)),
                s.b[i] as f64,
                ">=",
                0.0,
            );
        }
        if !(0..=1).contains(&s.u[i]) {
            col.push(
                Family::Domain,
                format!("u,i={}", col.id(i)),
                s.u[i] as f64,
                "in",
                1.0,
            );
        }
        for j in 0..n {
            if s.c[i][j] < 0 {
                let idx = format!("c,{}", col.ij(i, j));
                col.push(Family::Domain, idx, s.c[i][j] as f64, ">=", 0.0);
            }
            if !(0..=1).contains(&s.e[i][j]) {
                let idx = format!("e,{}", col.ij(i, j));
                col.push(Family::Domain, idx, s.e[i][j] as f64, "in", 1.0);
            }
        }
    }
    for (&(k, i, j), &v) in &s.y {
        if i >= j || k >= n || j >= n || !(0..=1).contains(&v) {
            col.push(
                Family::Domain,
                format!("y,k={k},i={i},j={j}"),
                v as f64,
                "in",
                1.0,
            );
        }
    }
    let y = |k: usize, i: usize, j: usize| s.y.get(&(k, i, j)).copied().unwrap_or(0) as f64;

    let objective = (s.total_primary() - s.total_backup()) as f64;
    col.eq(
        Family::Objective,
        |_| "total".into(),
        s.objective as f64,
        objective,
    );

    for i in 0..n {
        for j in 0..n {
            let c = s.c[i][j] as f64;
            let e = s.e[i][j] as f64;
            if indep.get(i, j) {
                col.eq(Family::FailureIndependence, |k| k.ij(i, j), c, 0.0);
            }
            if big_m * e - c < -TOLERANCE {
                let idx = col.ij(i, j);
                col.push(
                    Family::ReplicationIndicatorUpper,
                    idx,
                    big_m * e - c,
                    ">=",
                    0.0,
                );
            }
            col.le(Family::ReplicationIndicatorLower, |k| k.ij(i, j), e, c);
            if (s.b[j] as f64) - c < -TOLERANCE {
                let idx = col.ij(i, j);
                col.push(Family::BackupCoverage, idx, s.b[j] as f64 - c, ">=", 0.0);
            }
            let r = s.r[i][j] as f64;
            col.le(
                Family::BandwidthDemand,
                |k| k.ij(i, j),
                params.bandwidth_mbps * c,
                r,
            );

            let cap = params.alpha * topo.capacity(i, j);
            col.le(Family::BandwidthReservation, |k| k.ij(i, j), r, cap);
            for &(k, m) in instance.paths.pairs_through(i, j) {
                let rhs = cap - params.gamma() * params.bandwidth_mbps * s.c[k][m] as f64;
                col.le(
                    Family::BandwidthReservation,
                    |col| format!("{},k={},m={}", col.ij(i, j), col.id(k), col.id(m)),
                    r,
                    rhs,
                );
            }

            if e != 0.0 {
                match topo.latency(i, j) {
                    Some(delta) => col.le(
                        Family::LatencyLimit,
                        |k| k.ij(i, j),
                        e * delta,
                        params.lworst_ms,
                    ),
                    None => {
                        let idx = col.ij(i, j);
                        col.push(
                            Family::LatencyLimit,
                            idx,
                            f64::INFINITY,
                            "<=",
                            params.lworst_ms,
                        );
                    }
                }
            }

            if c > 0.0 && instance.unprotectable(i, j) {
                let idx = col.ij(i, j);
                col.push(Family::UnprotectedReplication, idx, c, "=", 0.0);
            }
        }
        let row_sum: i64 = s.c[i].iter().sum();
        col.eq(
            Family::BackupAssignment,
            |k| format!("i={}", k.id(i)),
            row_sum as f64,
            s.x[i] as f64,
        );
    }

    for k in 0..n {
        let mut exclusion = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let (yv, eik, ejk) = (y(k, i, j), s.e[i][k] as f64, s.e[j][k] as f64);
                let idx =
                    |col: &Collector| format!("k={},i={},j={}", col.id(k), col.id(i), col.id(j));
                if yv < eik + ejk - 1.0 - TOLERANCE {
                    let s = idx(&col);
                    col.push(Family::SharingIndicatorLower, s, yv, ">=", eik + ejk - 1.0);
                }
                col.le(Family::SharingIndicatorFirst, idx, yv, eik);
                col.le(Family::SharingIndicatorSecond, idx, yv, ejk);
                if indep.get(i, j) {
                    exclusion += yv;
                }
            }
        }
        col.eq(
            Family::SharingExclusion,
            |c| format!("k={}", c.id(k)),
            exclusion,
            0.0,
        );
    }

    for i in 0..n {
        let load = (s.x[i] + s.b[i]) as f64;
        let u = s.u[i] as f64;
        if big_m * u - load < -TOLERANCE {
            let idx = format!("i={}", col.id(i));
            col.push(Family::ActiveSiteUpper, idx, big_m * u - load, ">=", 0.0);
        }
        col.le(
            Family::ActiveSiteLower,
            |c| format!("i={}", c.id(i)),
            u,
            load,
        );
    }
    let limit = match params.umax {
        SiteLimit::Unbounded => f64::INFINITY,
        SiteLimit::AtMost(m) => f64::from(m),
    };
    col.le(
        Family::ActiveSiteLimit,
        |_| "all".into(),
        s.active_sites() as f64,
        limit,
    );

    col.out
}

/// Min-form bandwidth audit: for every directed link,
/// `B·c_ij + γ·B·max_{k,m}(c_km·s^km_ij) ≤ α·W_ij`.
pub fn bandwidth_audit(solution: &PlacementSolution, instance: &Instance) -> Vec<Violation> {
    let topo = &instance.topology;
    let params = &instance.params;
    let n = instance.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let worst = instance
                .paths
                .pairs_through(i, j)
                .iter()
                .map(|&(k, m)| solution.c[k][m])
                .max()
                .unwrap_or(0) as f64;
            let used = params.bandwidth_mbps * solution.c[i][j] as f64
                + params.gamma() * params.bandwidth_mbps * worst;
            let cap = params.alpha * topo.capacity(i, j);
            if used > cap + TOLERANCE {
                out.push(Violation {
                    family: Family::BandwidthReservation,
                    indices: format!("i={},j={}", topo.site_id(i), topo.site_id(j)),
                    lhs: used,
                    sense: "<=",
                    rhs: cap,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PlacementParams;
    use crate::topology::Topology;

    fn triangle(params: PlacementParams) -> Instance {
        let t = Topology::from_json(
            r#"{"name": "tri", "sites": [
                {"id": "A", "gateway": true}, {"id": "B", "gateway": true}, {"id": "C", "gateway": true}],
                "links": [
                  {"a": "A", "b": "B", "capacity_mbps": 4800, "latency_ms": 0.5},
                  {"a": "B", "b": "C", "capacity_mbps": 4800, "latency_ms": 0.5},
                  {"a": "A", "b": "C", "capacity_mbps": 4800, "latency_ms": 2.0}]}"#,
        )
        .unwrap();
        Instance::prepare(t, params).unwrap()
    }

    fn derive(inst: &Instance, entries: &[(usize, usize, i64)]) -> PlacementSolution {
        let mut c = vec![vec![0; inst.len()]; inst.len()];
        for &(i, j, v) in entries {
            c[i][j] = v;
        }
        PlacementSolution::derive(inst, c)
    }

    #[test]
    fn zero_solution_is_feasible() {
        let inst = triangle(PlacementParams::new(0.05, 1.3));
        assert!(check_solution(&PlacementSolution::zeros(3), &inst).is_empty());
    }

    #[test]
    fn dependent_pair_violates_independence() {
        let mut inst = triangle(PlacementParams::new(0.05, 1.3).with_gamma(false));
        inst.independence.set(0, 1, true);
        let v = check_solution(&derive(&inst, &[(0, 1, 1)]), &inst);
        assert!(v
            .iter()
            .any(|v| v.family == Family::FailureIndependence && v.indices == "i=A,j=B"));
    }

    #[test]
    fn under_provisioned_backup_violates_coverage() {
        let inst = triangle(PlacementParams::new(0.1, 1.3).with_gamma(false));
        let mut s = derive(&inst, &[(0, 1, 2)]);
        assert!(check_solution(&s, &inst).is_empty());
        s.b[1] = 1;
        s.objective += 1;
        let v = check_solution(&s, &inst);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].family, Family::BackupCoverage);
        assert_eq!((v[0].lhs, v[0].rhs), (-1.0, 0.0));
    }

    #[test]
    fn latency_limit_applies_to_replication_links() {
        let inst = triangle(PlacementParams::new(0.05, 1.3).with_gamma(false));
        let v = check_solution(&derive(&inst, &[(0, 2, 1)]), &inst);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].family, Family::LatencyLimit);
        assert_eq!(v[0].lhs, 2.0);
    }

    #[test]
    fn secondary_reservation_consumes_capacity() {
        // alpha W = 240 per direction: replicating A->B reserves 240 on A->C
        // and C->B, so A->C cannot carry its own replication as well.
        let inst = triangle(PlacementParams::new(0.05, 5.0));
        assert!(check_solution(&derive(&inst, &[(0, 1, 1)]), &inst).is_empty());
        let s = derive(&inst, &[(0, 1, 1), (0, 2, 1)]);
        let v = check_solution(&s, &inst);
        assert!(v.iter().any(|v| v.family == Family::BandwidthDemand));
        assert!(!bandwidth_audit(&s, &inst).is_empty());
    }

    #[test]
    fn unlinked_replication_fails() {
        let t = Topology::from_json(
            r#"{"name": "c", "sites": [
                {"id": "A", "gateway": true}, {"id": "B", "gateway": true}, {"id": "C", "gateway": true}],
                "links": [
                  {"a": "A", "b": "B", "capacity_mbps": 4800, "latency_ms": 0.5},
                  {"a": "B", "b": "C", "capacity_mbps": 4800, "latency_ms": 0.5}]}"#,
        )
        .unwrap();
        let inst = Instance::prepare(t, PlacementParams::new(0.05, 1.3).with_gamma(false)).unwrap();
        let v = check_solution(&derive(&inst, &[(0, 2, 1)]), &inst);
        assert!(v.iter().any(|v| v.family == Family::BandwidthDemand));
        assert!(v.iter().any(|v| v.family == Family::LatencyLimit));
    }

    #[test]
    fn bridge_replication_rejected_only_with_secondary_paths() {
        let t = Topology::from_json(
            r#"{"name": "p", "sites": [{"id": "A", "gateway": true}, {"id": "B", "gateway": true}],
                "links": [{"a": "A", "b": "B", "capacity_mbps": 4800, "latency_ms": 0.5}]}"#,
        )
        .unwrap();
        let with = Instance::prepare(t.clone(), PlacementParams::new(0.1, 1.3)).unwrap();
        let without = with
            .with_params(PlacementParams::new(0.1, 1.3).with_gamma(false))
            .unwrap();
        let s = derive(&with, &[(0, 1, 2), (1, 0, 2)]);
        assert!(check_solution(&s, &with)
            .iter()
            .any(|v| v.family == Family::UnprotectedReplication));
        assert!(check_solution(&derive(&without, &[(0, 1, 2), (1, 0, 2)]), &without).is_empty());
    }

    #[test]
    fn sharing_exclusion_for_dependent_sources() {
        let mut inst = triangle(PlacementParams::new(0.05, 5.0).with_gamma(false));
        inst.independence.set(0, 1, true);
        let s = derive(&inst, &[(0, 2, 1), (1, 2, 1)]);
        let v = check_solution(&s, &inst);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].family, Family::SharingExclusion);
    }

    #[test]
    fn inconsistent_indicators_are_reported() {
        let inst = triangle(PlacementParams::new(0.05, 1.3).with_gamma(false));
        let mut s = derive(&inst, &[(0, 1, 1)]);
        s.e[0][1] = 0;
        s.u[2] = 1;
        let fams: Vec<Family> = check_solution(&s, &inst).iter().map(|v| v.family).collect();
        assert!(fams.contains(&Family::ReplicationIndicatorUpper));
        assert!(fams.contains(&Family::ActiveSiteLower));
    }
}
