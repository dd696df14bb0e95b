#![allow(dead_code)]

use std::path::PathBuf;

use drplan_core::model::TOLERANCE;
use drplan_core::{Instance, PlacementSolution, Topology};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BUNDLED: [&str; 8] = [
    "pair",
    "triangle",
    "chain",
    "four_cycle",
    "five_site",
    "clustered",
    "mixed",
    "brazil",
];

pub fn bundled_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../topologies")
        .join(format!("{name}.json"))
}

pub fn bundled(name: &str) -> Topology {
    drplan_core::load_topology(bundled_path(name)).expect("bundled topology loads")
}

/// Knobs for [`random_topology`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub sites: usize,
    /// Links beyond the spanning tree.
    pub extra_links: usize,
    pub capacities: &'static [f64],
}

/// A connected topology with a random spanning tree, a few extra links,
/// random gateways (at least one) and latencies on a 0.1 ms grid so that
/// equal-latency paths occur.
pub fn random_topology(seed: u64, shape: Shape) -> Topology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.sites;
    let ids: Vec<String> = (0..n).map(|i| format!("S{i}")).collect();
    let mut gateways: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.4)).collect();
    if !gateways.iter().any(|&g| g) {
        gateways[rng.gen_range(0..n)] = true;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut linked = std::collections::BTreeSet::new();
    for pos in 1..n {
        let a = order[pos];
        let b = order[rng.gen_range(0..pos)];
        linked.insert((a.min(b), a.max(b)));
    }
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
        .filter(|p| !linked.contains(p))
        .collect();
    candidates.shuffle(&mut rng);
    linked.extend(candidates.into_iter().take(shape.extra_links));

    let sites: Vec<serde_json::Value> = (0..n)
        .map(|i| serde_json::json!({"id": ids[i], "gateway": gateways[i]}))
        .collect();
    let links: Vec<serde_json::Value> = linked
        .iter()
        .map(|&(a, b)| {
            let capacity = *shape.capacities.choose(&mut rng).unwrap();
            let latency = f64::from(rng.gen_range(2..=30)) / 10.0;
            serde_json::json!({
                "a": ids[a], "b": ids[b], "capacity_mbps": capacity, "latency_ms": latency
            })
        })
        .collect();
    let doc = serde_json::json!({"name": format!("random-{seed}"), "sites": sites, "links": links});
    Topology::from_json(&doc.to_string()).expect("generated topology is valid")
}

/// Unreachable-set oracle written against the raw site and link lists:
/// label propagation to a fixed point instead of a queue-based search.
pub fn unreachable_after(
    t: &Topology,
    failed_site: Option<&str>,
    failed_link: Option<(&str, &str)>,
) -> Vec<bool> {
    let sites = t.sites();
    let alive = |id: &str| failed_site != Some(id);
    let mut reached: Vec<bool> = sites.iter().map(|s| s.gateway && alive(&s.id)).collect();
    loop {
        let mut changed = false;
        for link in t.links() {
            if failed_link == Some((link.a.as_str(), link.b.as_str()))
                || failed_link == Some((link.b.as_str(), link.a.as_str()))
            {
                continue;
            }
            if !alive(&link.a) || !alive(&link.b) {
                continue;
            }
            let ia = sites.iter().position(|s| s.id == link.a).unwrap();
            let ib = sites.iter().position(|s| s.id == link.b).unwrap();
            if reached[ia] != reached[ib] {
                reached[ia] = true;
                reached[ib] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    reached.iter().map(|r| !r).collect()
}

pub fn oracle_matrix(t: &Topology) -> Vec<Vec<bool>> {
    let n = t.len();
    let mut m = vec![vec![false; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    let mut events: Vec<Vec<bool>> = Vec::new();
    for s in t.sites() {
        events.push(unreachable_after(t, Some(&s.id), None));
    }
    for l in t.links() {
        events.push(unreachable_after(t, None, Some((&l.a, &l.b))));
    }
    for down in events {
        for i in 0..n {
            for j in 0..n {
                if down[i] && down[j] {
                    m[i][j] = true;
                }
            }
        }
    }
    m
}

/// Every simple path from `k` to `m` that avoids the direct link, found by
/// depth-first enumeration over the raw link list. Returns (latency, hops).
pub fn all_avoiding_paths(t: &Topology, k: usize, m: usize) -> Vec<(f64, Vec<usize>)> {
    let n = t.len();
    let mut adj = vec![Vec::new(); n];
    for l in t.links() {
        let a = t.site_index(&l.a).unwrap();
        let b = t.site_index(&l.b).unwrap();
        if (a, b) == (k, m) || (a, b) == (m, k) {
            continue;
        }
        adj[a].push((b, l.latency_ms));
        adj[b].push((a, l.latency_ms));
    }
    let mut found = Vec::new();
    let mut stack = vec![k];
    let mut on_path = vec![false; n];
    on_path[k] = true;
    fn walk(
        at: usize,
        m: usize,
        latency: f64,
        adj: &[Vec<(usize, f64)>],
        stack: &mut Vec<usize>,
        on_path: &mut [bool],
        found: &mut Vec<(f64, Vec<usize>)>,
    ) {
        if at == m {
            found.push((latency, stack.clone()));
            return;
        }
        for &(next, d) in &adj[at] {
            if on_path[next] {
                continue;
            }
            on_path[next] = true;
            stack.push(next);
            walk(next, m, latency + d, adj, stack, on_path, found);
            stack.pop();
            on_path[next] = false;
        }
    }
    walk(k, m, 0.0, &adj, &mut stack, &mut on_path, &mut found);
    found
}

/// Directed bandwidth audit computed from the secondary-path hops:
/// B·c_ij + γ·B·max over pairs routed through (i, j) of c_km ≤ α·W_ij.
pub fn audit_by_hand(inst: &Instance, s: &PlacementSolution) -> Vec<(usize, usize)> {
    let t = &inst.topology;
    let p = &inst.params;
    let mut over = Vec::new();
    for (i, j) in t.directed_pairs() {
        let mut reserved = 0;
        for (k, m) in t.directed_pairs() {
            if let Some(path) = inst.paths.get(k, m).flatten() {
                if path.hops.windows(2).any(|w| (w[0], w[1]) == (i, j)) {
                    reserved = reserved.max(s.c[k][m]);
                }
            }
        }
        let used =
            p.bandwidth_mbps * s.c[i][j] as f64 + p.gamma() * p.bandwidth_mbps * reserved as f64;
        if used > p.alpha * t.capacity(i, j) + TOLERANCE {
            over.push((i, j));
        }
    }
    over
}
