//! Secondary paths: for every ordered pair of linked sites `(k, m)`, the
//! minimum-latency path from `k` to `m` that does not use the direct link.
//!
//! Ties are broken by hop count, then by the lexicographic order of the
//! site-id sequence, so the output does not depend on input ordering
//! beyond site ids.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;

use crate::topology::Topology;

/// Link latencies are compared on an integer grid of 1e-9 ms so that equal
/// sums compare equal regardless of summation order.
const LATENCY_QUANTUM_MS: f64 = 1e-9;

fn quantize(ms: f64) -> i64 {
    (ms / LATENCY_QUANTUM_MS).round() as i64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondaryPath {
    pub source: usize,
    pub target: usize,
    /// Site indices from `source` to `target`, inclusive.
    pub hops: Vec<usize>,
    pub latency_ms: f64,
}

impl SecondaryPath {
    /// Directed edges `(i, j)` along the traversal.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.hops.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn uses_edge(&self, i: usize, j: usize) -> bool {
        self.edges().any(|e| e == (i, j))
    }
}

/// Sum of link latencies along `path`'s hops.
pub fn path_latency(path: &SecondaryPath, topology: &Topology) -> f64 {
    path.edges()
        .map(|(i, j)| topology.latency(i, j).expect("path hops are linked"))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondaryPathSet {
    paths: BTreeMap<(usize, usize), Option<SecondaryPath>>,
    // directed edge -> pairs (k, m) whose secondary path traverses it
    through: BTreeMap<(usize, usize), Vec<(usize, usize)>>,
}

impl SecondaryPathSet {
    /// Outer `None`: `(k, m)` is not a linked pair. Inner `None`: the link is
    /// a bridge and no secondary path exists.
    pub fn get(&self, k: usize, m: usize) -> Option<Option<&SecondaryPath>> {
        self.paths.get(&(k, m)).map(Option::as_ref)
    }

    pub fn is_absent(&self, k: usize, m: usize) -> bool {
        matches!(self.paths.get(&(k, m)), Some(None))
    }

    /// s^km_ij.
    pub fn membership(&self, k: usize, m: usize, i: usize, j: usize) -> bool {
        self.through
            .get(&(i, j))
            .is_some_and(|pairs| pairs.binary_search(&(k, m)).is_ok())
    }

    /// Pairs `(k, m)` whose secondary path traverses directed edge `(i, j)`,
    /// sorted.
    pub fn pairs_through(&self, i: usize, j: usize) -> &[(usize, usize)] {
        self.through.get(&(i, j)).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Option<SecondaryPath>)> {
        self.paths.iter()
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// One line per ordered pair: `k,m,hops,latency_ms` with `:`-separated
    /// hops, or `k,m,ABSENT`.
    pub fn dump(&self, topology: &Topology) -> String {
        let mut out = String::new();
        for (&(k, m), path) in &self.paths {
            let (ks, ms) = (topology.site_id(k), topology.site_id(m));
            match path {
                Some(p) => {
                    let hops: Vec<&str> = p.hops.iter().map(|&h| topology.site_id(h)).collect();
                    let _ = writeln!(out, "{ks},{ms},{},{}", hops.join(":"), p.latency_ms);
                }
                None => {
                    let _ = writeln!(out, "{ks},{ms},ABSENT");
                }
            }
        }
        out
    }
}

pub fn compute_secondary_paths(topology: &Topology) -> SecondaryPathSet {
    let mut rank: Vec<usize> = (0..topology.len()).collect();
    rank.sort_by(|&a, &b| topology.site_id(a).cmp(topology.site_id(b)));
    let mut id_rank = vec![0; topology.len()];
    for (r, &i) in rank.iter().enumerate() {
        id_rank[i] = r;
    }

    let mut paths = BTreeMap::new();
    let mut through: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (k, m) in topology.directed_pairs() {
        let excluded = topology.link_index(k, m).expect("pair is linked");
        let path = shortest_avoiding(topology, k, m, excluded, &id_rank).map(|hops| {
            let mut p = SecondaryPath {
                source: k,
                target: m,
                hops,
                latency_ms: 0.0,
            };
            p.latency_ms = path_latency(&p, topology);
            p
        });
        if let Some(p) = &path {
            for e in p.edges() {
                through.entry(e).or_default().push((k, m));
            }
        }
        paths.insert((k, m), path);
    }
    // directed_pairs() is sorted, so every list is already sorted
    SecondaryPathSet { paths, through }
}

/// Label-setting search over (latency, hops, id-rank sequence). The order is
/// total and preserved when the same edge is appended, so the first label
/// popped for a node is its best.
fn shortest_avoiding(
    topology: &Topology,
    source: usize,
    target: usize,
    excluded_link: usize,
    id_rank: &[usize],
) -> Option<Vec<usize>> {
    type Label = (i64, usize, Vec<usize>, Vec<usize>);
    let mut settled = vec![false; topology.len()];
    let mut heap: BinaryHeap<Reverse<Label>> = BinaryHeap::new();
    heap.push(Reverse((0, 0, vec![id_rank[source]], vec![source])));
    while let Some(Reverse((lat, hops, ranks, nodes))) = heap.pop() {
        let v = *nodes.last().unwrap();
        if settled[v] {
            continue;
        }
        settled[v] = true;
        if v == target {
            return Some(nodes);
        }
        for &(w, li) in topology.incident(v) {
            if li == excluded_link || settled[w] {
                continue;
            }
            let step = quantize(topology.links()[li].latency_ms);
            let mut r = ranks.clone();
            r.push(id_rank[w]);
            let mut n = nodes.clone();
            n.push(w);
            heap.push(Reverse((lat + step, hops + 1, r, n)));
        }
    }
    None
}
