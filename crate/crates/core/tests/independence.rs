#![allow(clippy::needless_range_loop)]

mod common;

use common::{oracle_matrix, random_topology, unreachable_after, Shape};
use drplan_core::{build_independence_matrix, unreachable_sites, FailureEvent};
use proptest::prelude::*;

const SHAPE_CAPS: &[f64] = &[4800.0, 10000.0];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_matches_exhaustive_enumeration(seed in any::<u64>(), sites in 2usize..=8, extra in 0usize..6) {
        let t = random_topology(seed, Shape { sites, extra_links: extra, capacities: SHAPE_CAPS });
        let matrix = build_independence_matrix(&t);
        let expected = oracle_matrix(&t);
        for i in 0..t.len() {
            prop_assert!(matrix.get(i, i));
            for j in 0..t.len() {
                prop_assert_eq!(matrix.get(i, j), matrix.get(j, i));
                prop_assert_eq!(matrix.get(i, j), expected[i][j], "pair ({}, {})", i, j);
            }
        }
    }

    #[test]
    fn single_events_match_oracle(seed in any::<u64>(), sites in 2usize..=8, extra in 0usize..6) {
        let t = random_topology(seed, Shape { sites, extra_links: extra, capacities: SHAPE_CAPS });
        for s in t.sites() {
            let got = unreachable_sites(&t, &FailureEvent::Site(s.id.clone())).unwrap();
            let want: Vec<String> = unreachable_after(&t, Some(&s.id), None)
                .iter()
                .enumerate()
                .filter(|(_, &d)| d)
                .map(|(i, _)| t.site_id(i).to_string())
                .collect();
            prop_assert_eq!(got.into_iter().collect::<Vec<_>>(), want);
        }
        for l in t.links() {
            let got = unreachable_sites(&t, &FailureEvent::Link(l.b.clone(), l.a.clone())).unwrap();
            let want: Vec<String> = unreachable_after(&t, None, Some((&l.a, &l.b)))
                .iter()
                .enumerate()
                .filter(|(_, &d)| d)
                .map(|(i, _)| t.site_id(i).to_string())
                .collect();
            prop_assert_eq!(got.into_iter().collect::<Vec<_>>(), want);
        }
    }
}

#[test]
fn bundled_matrices_match_oracle() {
    for name in common::BUNDLED {
        let t = common::bundled(name);
        let matrix = build_independence_matrix(&t);
        let expected = oracle_matrix(&t);
        for i in 0..t.len() {
            for j in 0..t.len() {
                assert_eq!(matrix.get(i, j), expected[i][j], "{name} ({i}, {j})");
            }
        }
    }
}

#[test]
fn clustered_stubs_fail_with_their_hub() {
    let t = common::bundled("clustered");
    let m = build_independence_matrix(&t);
    let idx = |id: &str| t.site_index(id).unwrap();
    assert!(m.get(idx("A"), idx("E")));
    assert!(m.get(idx("A"), idx("F")));
    assert!(m.get(idx("E"), idx("F")));
    assert!(!m.get(idx("B"), idx("E")));
    assert!(!m.get(idx("B"), idx("D")));
}

#[test]
fn single_gateway_ring_fails_together() {
    let t = common::bundled("four_cycle");
    let m = build_independence_matrix(&t);
    for i in 0..t.len() {
        for j in 0..t.len() {
            assert!(m.get(i, j));
        }
    }
}
