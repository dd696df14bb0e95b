use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use super::bounds::variable_bounds;
use super::{Family, Instance, PlacementSolution, SiteLimit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Integer,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Sense::Le => lhs <= rhs + tol,
            Sense::Ge => lhs >= rhs - tol,
            Sense::Eq => (lhs - rhs).abs() <= tol,
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub family: Family,
    pub name: String,
    /// Non-zero coefficients only; a row may be empty.
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }
}

/// Where each placement variable lives in the model's variable vector.
#[derive(Debug, Clone, Default)]
pub(crate) struct Layout {
    pub x: Vec<VarId>,
    pub b: Vec<VarId>,
    pub u: Vec<VarId>,
    pub c: BTreeMap<(usize, usize), VarId>,
    pub e: BTreeMap<(usize, usize), VarId>,
    pub r: BTreeMap<(usize, usize), VarId>,
    pub y: BTreeMap<(usize, usize, usize), VarId>,
}

/// The placement program, maximizing Σ (x_i − b_i).
///
/// Variables exist only for linked pairs (c, e, r) and for triples where
/// both i and j are linked to k (y). Every other variable of the full
/// formulation is identically zero.
#[derive(Debug, Clone)]
pub struct MilpModel {
    instance: Instance,
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    pub(crate) layout: Layout,
}

struct Builder<'a> {
    instance: &'a Instance,
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
}

impl Builder<'_> {
    fn var(&mut self, name: String, kind: VarKind, upper: f64, objective: f64) -> VarId {
        self.vars.push(Variable {
            name,
            kind,
            lower: 0.0,
            upper,
            objective,
        });
        VarId(self.vars.len() - 1)
    }

    fn row(
        &mut self,
        family: Family,
        name: String,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        let terms = terms.into_iter().filter(|&(_, a)| a != 0.0).collect();
        self.constraints.push(Constraint {
            family,
            name: format!("{}[{name}]", family.name()),
            terms,
            sense,
            rhs,
        });
    }

    fn id(&self, i: usize) -> &str {
        self.instance.topology.site_id(i)
    }
}

pub fn build_model(instance: &Instance) -> MilpModel {
    let topo = &instance.topology;
    let params = &instance.params;
    let indep = &instance.independence;
    let n = topo.len();
    let pairs = topo.directed_pairs();
    let bounds = variable_bounds(topo, params);
    let big_m = params.big_m;

    let mut bld = Builder {
        instance,
        vars: Vec::new(),
        constraints: Vec::new(),
    };
    let mut layout = Layout::default();

    for i in 0..n {
        let name = format!("x[{}]", bld.id(i));
        layout
            .x
            .push(bld.var(name, VarKind::Integer, bounds.x[i] as f64, 1.0));
    }
    for i in 0..n {
        let name = format!("b[{}]", bld.id(i));
        layout
            .b
            .push(bld.var(name, VarKind::Integer, bounds.b[i] as f64, -1.0));
    }
    for i in 0..n {
        let name = format!("u[{}]", bld.id(i));
        layout.u.push(bld.var(name, VarKind::Binary, 1.0, 0.0));
    }
    for &(i, j) in &pairs {
        let upper = if instance.unprotectable(i, j) {
            0.0
        } else {
            bounds.c[&(i, j)] as f64
        };
        let name = format!("c[{},{}]", bld.id(i), bld.id(j));
        layout
            .c
            .insert((i, j), bld.var(name, VarKind::Integer, upper, 0.0));
    }
    for &(i, j) in &pairs {
        let name = format!("e[{},{}]", bld.id(i), bld.id(j));
        layout
            .e
            .insert((i, j), bld.var(name, VarKind::Binary, 1.0, 0.0));
    }
    for &(i, j) in &pairs {
        let name = format!("r[{},{}]", bld.id(i), bld.id(j));
        layout.r.insert(
            (i, j),
            bld.var(name, VarKind::Integer, bounds.r[&(i, j)] as f64, 0.0),
        );
    }
    for k in 0..n {
        let nbrs: Vec<usize> = topo.neighbor_indices(k).collect();
        for (a, &i) in nbrs.iter().enumerate() {
            for &j in &nbrs[a + 1..] {
                let name = format!("y[{},{},{}]", bld.id(k), bld.id(i), bld.id(j));
                layout
                    .y
                    .insert((k, i, j), bld.var(name, VarKind::Binary, 1.0, 0.0));
            }
        }
    }

    let pair_name = |b: &Builder, i: usize, j: usize| format!("{},{}", b.id(i), b.id(j));

    for &(i, j) in &pairs {
        let name = pair_name(&bld, i, j);
        let coef = if indep.get(i, j) { 1.0 } else { 0.0 };
        bld.row(
            Family::FailureIndependence,
            name,
            vec![(layout.c[&(i, j)], coef)],
            Sense::Eq,
            0.0,
        );
    }
    for i in 0..n {
        let mut terms: Vec<(VarId, f64)> = topo
            .neighbor_indices(i)
            .map(|j| (layout.c[&(i, j)], 1.0))
            .collect();
        terms.push((layout.x[i], -1.0));
        let name = bld.id(i).to_string();
        bld.row(Family::BackupAssignment, name, terms, Sense::Eq, 0.0);
    }
    for &(i, j) in &pairs {
        let (c, e) = (layout.c[&(i, j)], layout.e[&(i, j)]);
        let name = pair_name(&bld, i, j);
        bld.row(
            Family::ReplicationIndicatorUpper,
            name.clone(),
            vec![(e, big_m), (c, -1.0)],
            Sense::Ge,
            0.0,
        );
        bld.row(
            Family::ReplicationIndicatorLower,
            name,
            vec![(e, 1.0), (c, -1.0)],
            Sense::Le,
            0.0,
        );
    }
    for (&(k, i, j), &y) in &layout.y {
        let (eik, ejk) = (layout.e[&(i, k)], layout.e[&(j, k)]);
        let name = format!("{},{},{}", bld.id(k), bld.id(i), bld.id(j));
        bld.row(
            Family::SharingIndicatorLower,
            name.clone(),
            vec![(y, 1.0), (eik, -1.0), (ejk, -1.0)],
            Sense::Ge,
            -1.0,
        );
        bld.row(
            Family::SharingIndicatorFirst,
            name.clone(),
            vec![(y, 1.0), (eik, -1.0)],
            Sense::Le,
            0.0,
        );
        bld.row(
            Family::SharingIndicatorSecond,
            name,
            vec![(y, 1.0), (ejk, -1.0)],
            Sense::Le,
            0.0,
        );
    }
    for k in 0..n {
        let terms = layout
            .y
            .range((k, 0, 0)..(k + 1, 0, 0))
            .map(|(&(_, i, j), &y)| (y, if indep.get(i, j) { 1.0 } else { 0.0 }))
            .collect();
        let name = bld.id(k).to_string();
        bld.row(Family::SharingExclusion, name, terms, Sense::Eq, 0.0);
    }
    for &(i, j) in &pairs {
        let name = pair_name(&bld, i, j);
        bld.row(
            Family::BackupCoverage,
            name,
            vec![(layout.b[j], 1.0), (layout.c[&(i, j)], -1.0)],
            Sense::Ge,
            0.0,
        );
    }
    for &(i, j) in &pairs {
        let name = pair_name(&bld, i, j);
        bld.row(
            Family::BandwidthDemand,
            name,
            vec![
                (layout.c[&(i, j)], params.bandwidth_mbps),
                (layout.r[&(i, j)], -1.0),
            ],
            Sense::Le,
            0.0,
        );
    }
    let reserve = params.gamma() * params.bandwidth_mbps;
    for &(i, j) in &pairs {
        let r = layout.r[&(i, j)];
        let cap = params.alpha * topo.capacity(i, j);
        let name = pair_name(&bld, i, j);
        bld.row(
            Family::BandwidthReservation,
            name.clone(),
            vec![(r, 1.0)],
            Sense::Le,
            cap,
        );
        for &(k, m) in instance.paths.pairs_through(i, j) {
            let name = format!("{name}|{},{}", bld.id(k), bld.id(m));
            bld.row(
                Family::BandwidthReservation,
                name,
                vec![(r, 1.0), (layout.c[&(k, m)], reserve)],
                Sense::Le,
                cap,
            );
        }
    }
    for &(i, j) in &pairs {
        let delta = topo.latency(i, j).expect("linked");
        let name = pair_name(&bld, i, j);
        bld.row(
            Family::LatencyLimit,
            name,
            vec![(layout.e[&(i, j)], delta)],
            Sense::Le,
            params.lworst_ms,
        );
    }
    for i in 0..n {
        let name = bld.id(i).to_string();
        bld.row(
            Family::ActiveSiteUpper,
            name.clone(),
            vec![
                (layout.u[i], big_m),
                (layout.x[i], -1.0),
                (layout.b[i], -1.0),
            ],
            Sense::Ge,
            0.0,
        );
        bld.row(
            Family::ActiveSiteLower,
            name,
            vec![(layout.u[i], 1.0), (layout.x[i], -1.0), (layout.b[i], -1.0)],
            Sense::Le,
            0.0,
        );
    }
    let limit = match params.umax {
        SiteLimit::Unbounded => n as f64,
        SiteLimit::AtMost(u) => f64::from(u),
    };
    let terms = layout.u.iter().map(|&u| (u, 1.0)).collect();
    bld.row(
        Family::ActiveSiteLimit,
        "all".into(),
        terms,
        Sense::Le,
        limit,
    );

    MilpModel {
        instance: instance.clone(),
        vars: bld.vars,
        constraints: bld.constraints,
        layout,
    }
}

impl MilpModel {
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraints_in(&self, family: Family) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(move |c| c.family == family)
    }

    pub fn c_var(&self, i: usize, j: usize) -> Option<VarId> {
        self.layout.c.get(&(i, j)).copied()
    }

    pub fn e_var(&self, i: usize, j: usize) -> Option<VarId> {
        self.layout.e.get(&(i, j)).copied()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.vars
            .iter()
            .zip(values)
            .map(|(v, x)| v.objective * x)
            .sum()
    }

    /// Indices of rows and variables violated by `values`.
    pub fn infeasibilities(&self, values: &[f64], tol: f64) -> (Vec<usize>, Vec<usize>) {
        let rows = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.sense.holds(c.activity(values), c.rhs, tol))
            .map(|(i, _)| i)
            .collect();
        let vars = self
            .vars
            .iter()
            .zip(values)
            .enumerate()
            .filter(|(_, (v, &x))| x < v.lower - tol || x > v.upper + tol)
            .map(|(i, _)| i)
            .collect();
        (rows, vars)
    }

    /// Reads a full assignment back into placement form. Values are rounded
    /// to the nearest integer.
    pub fn decode(&self, values: &[f64]) -> PlacementSolution {
        let n = self.instance.len();
        let get = |v: VarId| values[v.0].round() as i64;
        let mut s = PlacementSolution::zeros(n);
        for i in 0..n {
            s.x[i] = get(self.layout.x[i]);
            s.b[i] = get(self.layout.b[i]);
            s.u[i] = get(self.layout.u[i]);
        }
        for (&(i, j), &v) in &self.layout.c {
            s.c[i][j] = get(v);
        }
        for (&(i, j), &v) in &self.layout.e {
            s.e[i][j] = get(v);
        }
        for (&(i, j), &v) in &self.layout.r {
            s.r[i][j] = get(v);
        }
        for (&key, &v) in &self.layout.y {
            let val = get(v);
            if val != 0 {
                s.y.insert(key, val);
            }
        }
        s.objective = s.total_primary() - s.total_backup();
        s
    }

    /// Inverse of [`MilpModel::decode`] for the variables the model holds.
    pub fn encode(&self, s: &PlacementSolution) -> Vec<f64> {
        let mut values = vec![0.0; self.vars.len()];
        for i in 0..self.instance.len() {
            values[self.layout.x[i].0] = s.x[i] as f64;
            values[self.layout.b[i].0] = s.b[i] as f64;
            values[self.layout.u[i].0] = s.u[i] as f64;
        }
        for (&(i, j), &v) in &self.layout.c {
            values[v.0] = s.c[i][j] as f64;
        }
        for (&(i, j), &v) in &self.layout.e {
            values[v.0] = s.e[i][j] as f64;
        }
        for (&(i, j), &v) in &self.layout.r {
            values[v.0] = s.r[i][j] as f64;
        }
        for (key, &v) in &self.layout.y {
            values[v.0] = s.y.get(key).copied().unwrap_or(0) as f64;
        }
        values
    }

    /// LP-format listing; each row is prefixed with its family name.
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "\\ placement program for {}",
            self.instance.topology.name()
        );
        out.push_str("maximize\n obj:");
        write_terms(
            &mut out,
            self.vars
                .iter()
                .enumerate()
                .filter(|(_, v)| v.objective != 0.0)
                .map(|(i, v)| (VarId(i), v.objective)),
            &self.vars,
        );
        out.push_str("\nsubject to\n");
        for c in &self.constraints {
            if c.terms.is_empty() {
                // rows whose variables were all fixed away stay visible as comments
                let _ = writeln!(out, "\\ {}: 0 {} {}", c.name, c.sense, c.rhs);
                continue;
            }
            let _ = write!(out, " {}:", c.name);
            write_terms(&mut out, c.terms.iter().copied(), &self.vars);
            let _ = writeln!(out, " {} {}", c.sense, c.rhs);
        }
        out.push_str("bounds\n");
        for v in &self.vars {
            let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
        }
        out.push_str("general\n");
        for v in self.vars.iter().filter(|v| v.kind == VarKind::Integer) {
            let _ = writeln!(out, " {}", v.name);
        }
        out.push_str("binary\n");
        for v in self.vars.iter().filter(|v| v.kind == VarKind::Binary) {
            let _ = writeln!(out, " {}", v.name);
        }
        out.push_str("end\n");
        out
    }
}

fn write_terms(out: &mut String, terms: impl Iterator<Item = (VarId, f64)>, vars: &[Variable]) {
    for (v, a) in terms {
        let sign = if a < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", a.abs(), vars[v.0].name);
    }
}
