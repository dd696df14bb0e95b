mod common;

use common::{audit_by_hand, random_topology, Shape};
use drplan_core::model::bandwidth_audit;
use drplan_core::{
    brute_force_oracle, build_model, check_solution, solve_exact, solve_greedy, ExactOptions,
    Instance, PlacementParams, PlacementSolution, Status, Topology,
};
use proptest::prelude::*;

const SMALL_CAPS: &[f64] = &[4800.0, 10000.0];
const WIDE_CAPS: &[f64] = &[2400.0, 4800.0, 7200.0, 10000.0, 20000.0];

fn instance(t: &Topology, alpha: f64, lworst: f64, gamma: bool) -> Instance {
    Instance::prepare(
        t.clone(),
        PlacementParams::new(alpha, lworst).with_gamma(gamma),
    )
    .unwrap()
}

fn exact(inst: &Instance) -> PlacementSolution {
    let outcome = solve_exact(&build_model(inst), &ExactOptions::default()).unwrap();
    assert_eq!(outcome.status, Status::Optimal);
    outcome.solution
}

fn assert_valid(inst: &Instance, s: &PlacementSolution) -> Result<(), TestCaseError> {
    let violations = check_solution(s, inst);
    prop_assert!(violations.is_empty(), "{:?}", violations);
    prop_assert!(bandwidth_audit(s, inst).is_empty());
    prop_assert!(audit_by_hand(inst, s).is_empty());
    prop_assert!(s.total_primary() >= s.total_backup() && s.total_backup() >= 0);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exact_matches_oracle(
        seed in any::<u64>(),
        sites in 2usize..=5,
        extra in 0usize..=2,
        lworst in prop::sample::select(vec![0.5, 1.3, 2.6]),
        gamma in any::<bool>(),
    ) {
        let t = random_topology(seed, Shape { sites, extra_links: extra, capacities: SMALL_CAPS });
        let inst = instance(&t, 0.05, lworst, gamma);
        let want = brute_force_oracle(&inst, 2).unwrap().solution;
        let got = exact(&inst);
        prop_assert_eq!(got.objective, want.objective);
        prop_assert_eq!(got.total_primary(), want.total_primary());
        prop_assert_eq!(got.total_backup(), want.total_backup());
        assert_valid(&inst, &got)?;
        assert_valid(&inst, &want)?;
    }

    #[test]
    fn every_backend_passes_the_checker(
        seed in any::<u64>(),
        sites in 2usize..=8,
        extra in 0usize..=4,
        alpha in prop::sample::select(vec![0.05, 0.1, 0.2]),
        lworst in prop::sample::select(vec![1.3, 2.6, 5.2]),
        gamma in any::<bool>(),
    ) {
        let t = random_topology(seed, Shape { sites, extra_links: extra, capacities: WIDE_CAPS });
        let inst = instance(&t, alpha, lworst, gamma);
        let model = build_model(&inst);
        let best = exact(&inst);
        assert_valid(&inst, &best)?;
        let greedy = solve_greedy(&model);
        prop_assert_eq!(greedy.status, Status::Feasible);
        assert_valid(&inst, &greedy.solution)?;
        prop_assert!(greedy.solution.objective <= best.objective);
    }

    #[test]
    fn objective_grows_with_alpha_and_lworst(
        seed in any::<u64>(),
        sites in 2usize..=6,
        extra in 0usize..=3,
        gamma in any::<bool>(),
    ) {
        let t = random_topology(seed, Shape { sites, extra_links: extra, capacities: WIDE_CAPS });
        let mut previous = i64::MIN;
        for alpha in [0.05, 0.1, 0.15] {
            let obj = exact(&instance(&t, alpha, 2.6, gamma)).objective;
            prop_assert!(obj >= previous);
            previous = obj;
        }
        let mut previous = i64::MIN;
        for lworst in [0.5, 1.3, 2.6, 5.2] {
            let obj = exact(&instance(&t, 0.1, lworst, gamma)).objective;
            prop_assert!(obj >= previous);
            previous = obj;
        }
    }

    #[test]
    fn secondary_paths_never_help(
        seed in any::<u64>(),
        sites in 2usize..=6,
        extra in 0usize..=3,
        alpha in prop::sample::select(vec![0.05, 0.1, 0.15]),
    ) {
        let t = random_topology(seed, Shape { sites, extra_links: extra, capacities: WIDE_CAPS });
        let with = exact(&instance(&t, alpha, 2.6, true));
        let without = exact(&instance(&t, alpha, 2.6, false));
        prop_assert!(without.objective >= with.objective);
        // a γ = 1 placement is also feasible when secondary paths are dropped
        prop_assert!(check_solution(&with, &instance(&t, alpha, 2.6, false)).is_empty());
    }
}

#[test]
fn exact_matches_oracle_on_bundled_topologies() {
    for name in common::BUNDLED {
        let t = common::bundled(name);
        if t.len() > 6 {
            continue;
        }
        for (alpha, lworst, gamma) in [(0.05, 1.3, true), (0.05, 1.3, false), (0.05, 0.9, true)] {
            let inst = instance(&t, alpha, lworst, gamma);
            let want = brute_force_oracle(&inst, 2).unwrap().solution;
            let got = exact(&inst);
            assert_eq!(
                (got.objective, got.total_primary()),
                (want.objective, want.total_primary()),
                "{name} alpha={alpha} lworst={lworst} gamma={gamma}"
            );
        }
    }
}

#[test]
fn optimal_backups_are_column_maxima() {
    for name in common::BUNDLED {
        let t = common::bundled(name);
        let s = exact(&instance(&t, 0.1, 2.6, true));
        for j in 0..t.len() {
            let max_in = (0..t.len()).map(|i| s.c[i][j]).max().unwrap();
            assert_eq!(s.b[j], max_in, "{name} site {j}");
        }
    }
}

#[test]
fn solves_are_repeatable() {
    let t = common::bundled("brazil");
    let inst = instance(&t, 0.1, 5.2, true);
    assert_eq!(exact(&inst), exact(&inst));
    let model = build_model(&inst);
    assert_eq!(solve_greedy(&model).solution, solve_greedy(&model).solution);
}

#[test]
fn oracle_refuses_large_instances() {
    let t = common::bundled("brazil");
    assert!(brute_force_oracle(&instance(&t, 0.05, 1.3, true), 2).is_err());
    let small = common::bundled("triangle");
    assert!(brute_force_oracle(&instance(&small, 0.05, 1.3, true), 4).is_err());
}

#[test]
fn time_limit_zero_yields_no_incumbent() {
    let t = common::bundled("five_site");
    let inst = instance(&t, 0.1, 2.6, true);
    let options = ExactOptions {
        time_limit: std::time::Duration::ZERO,
    };
    assert!(matches!(
        solve_exact(&build_model(&inst), &options),
        Err(drplan_core::solver::SolveError::NoIncumbent)
    ));
}

#[test]
fn two_sites_back_each_other_up() {
    let t = common::bundled("pair");
    let s = exact(&instance(&t, 0.05, 1.3, false));
    assert_eq!(
        (s.total_primary(), s.total_backup(), s.objective),
        (2, 2, 0)
    );
    // the only link is a bridge, so provisioning secondary paths forbids replication
    let s = exact(&instance(&t, 0.05, 1.3, true));
    assert_eq!(s.total_primary(), 0);
}
