//! Single-failure model and the Failure Independence Matrix.
//!
//! A site is unreachable after an event if it is the failed site, or if the
//! residual graph gives it no path to any surviving gateway. Failed links
//! are down in both directions.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::topology::Topology;

#[derive(Debug, thiserror::Error)]
pub enum FailureError {
    #[error("unknown site {0:?}")]
    UnknownSite(String),
    #[error("no link between {0:?} and {1:?}")]
    UnknownLink(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FailureEvent {
    Site(String),
    Link(String, String),
}

/// Index-resolved event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolvedEvent {
    Site(usize),
    /// Index into [`Topology::links`].
    Link(usize),
}

impl FailureEvent {
    pub fn resolve(&self, topology: &Topology) -> Result<ResolvedEvent, FailureError> {
        let lookup = |id: &str| {
            topology
                .site_index(id)
                .ok_or_else(|| FailureError::UnknownSite(id.to_string()))
        };
        match self {
            FailureEvent::Site(id) => Ok(ResolvedEvent::Site(lookup(id)?)),
            FailureEvent::Link(a, b) => {
                let (ia, ib) = (lookup(a)?, lookup(b)?);
                topology
                    .link_index(ia, ib)
                    .map(ResolvedEvent::Link)
                    .ok_or_else(|| FailureError::UnknownLink(a.clone(), b.clone()))
            }
        }
    }
}

/// Every single-site and single-link failure, sites first.
pub fn all_events(topology: &Topology) -> impl Iterator<Item = ResolvedEvent> {
    (0..topology.len())
        .map(ResolvedEvent::Site)
        .chain((0..topology.links().len()).map(ResolvedEvent::Link))
}

/// Unreachable-site mask for a resolved event.
pub fn unreachable_mask(topology: &Topology, event: ResolvedEvent) -> Vec<bool> {
    let n = topology.len();
    let (down_site, down_link) = match event {
        ResolvedEvent::Site(s) => (Some(s), None),
        ResolvedEvent::Link(l) => (None, Some(l)),
    };

    let mut reached = vec![false; n];
    let mut queue = VecDeque::new();
    for i in (0..n).filter(|&i| topology.is_gateway(i) && Some(i) != down_site) {
        reached[i] = true;
        queue.push_back(i);
    }
    while let Some(v) = queue.pop_front() {
        for &(w, li) in topology.incident(v) {
            if Some(li) == down_link || Some(w) == down_site || reached[w] {
                continue;
            }
            reached[w] = true;
            queue.push_back(w);
        }
    }
    reached.into_iter().map(|r| !r).collect()
}

pub fn unreachable_sites(
    topology: &Topology,
    event: &FailureEvent,
) -> Result<BTreeSet<String>, FailureError> {
    let resolved = event.resolve(topology)?;
    Ok(unreachable_mask(topology, resolved)
        .into_iter()
        .enumerate()
        .filter(|&(_, down)| down)
        .map(|(i, _)| topology.site_id(i).to_string())
        .collect())
}

/// `I_ij = 1` iff sites `i` and `j` can be unreachable under the same
/// single failure. The diagonal is always set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceMatrix {
    order: Vec<String>,
    entries: Vec<Vec<bool>>,
}

impl IndependenceMatrix {
    /// Builds a matrix directly from entries; used to force or relax
    /// independence assumptions. Symmetry and the unit diagonal are enforced.
    pub fn from_entries(order: Vec<String>, mut entries: Vec<Vec<bool>>) -> Self {
        let n = order.len();
        assert!(entries.len() == n && entries.iter().all(|r| r.len() == n));
        for i in 0..n {
            entries[i][i] = true;
            for j in 0..i {
                let v = entries[i][j] || entries[j][i];
                entries[i][j] = v;
                entries[j][i] = v;
            }
        }
        IndependenceMatrix { order, entries }
    }

    pub fn order(&self) -> &[String] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if i != j {
            self.entries[i][j] = value;
            self.entries[j][i] = value;
        }
    }

    /// Header row and column of site ids, 0/1 entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for id in &self.order {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        for (id, row) in self.order.iter().zip(&self.entries) {
            out.push_str(id);
            for &v in row {
                let _ = write!(out, ",{}", u8::from(v));
            }
            out.push('\n');
        }
        out
    }
}

pub fn build_independence_matrix(topology: &Topology) -> IndependenceMatrix {
    let n = topology.len();
    let mut entries = vec![vec![false; n]; n];
    for (i, row) in entries.iter_mut().enumerate() {
        row[i] = true;
    }
    for event in all_events(topology) {
        let down: Vec<usize> = unreachable_mask(topology, event)
            .into_iter()
            .enumerate()
            .filter_map(|(i, d)| d.then_some(i))
            .collect();
        for &i in &down {
            for &j in &down {
                entries[i][j] = true;
            }
        }
    }
    IndependenceMatrix {
        order: topology.sites().iter().map(|s| s.id.clone()).collect(),
        entries,
    }
}
