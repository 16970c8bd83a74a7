use proptest::prelude::*;

use wtap_core::baseline::cheapest_disjoint_uplink_cover;
use wtap_core::bench::{bench, AlgorithmSpec, BenchConfig, InstanceSource};
use wtap_core::component_dp::{slack_max, SlackDp};
use wtap_core::decomposition::{decompose, verify_witness_structure};
use wtap_core::generators::{gen_fig2, gen_random};
use wtap_core::greedy::{self, GreedyOptions};
use wtap_core::instance::{drop_set, is_k_thin, vertical_cost_table};
use wtap_core::io::{instance_to_json, read_instance};
use wtap_core::oracle::{brute_max_slack, brute_uplink_cover, exact_opt, OracleBudget};
use wtap_core::ratio_search::best_ratio_component;
use wtap_core::{Instance, LinkCatalog, LinkId, Rational};

fn small_instance(n_max: usize) -> impl Strategy<Value = Instance> {
    (1..=n_max, 0usize..=2, 1u64..=15, any::<u64>())
        .prop_map(|(n, per, wmax, seed)| gen_random(n, per * n, wmax, seed))
}

fn setup(inst: &Instance) -> (LinkCatalog<'_>, Vec<LinkId>, Vec<LinkId>) {
    let base = cheapest_disjoint_uplink_cover(inst).unwrap();
    let mut cat = LinkCatalog::new(inst);
    let mut u = base.to_catalog(&mut cat);
    u.sort_unstable();
    u.dedup();
    let mut search: Vec<LinkId> = cat.originals().chain(u.iter().copied()).collect();
    search.sort_unstable();
    search.dedup();
    (cat, u, search)
}

fn rho() -> impl Strategy<Value = Rational> {
    (0i128..=12, 1i128..=6).prop_map(|(p, q)| Rational::new(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn baseline_matches_brute_and_is_consistent(inst in small_instance(9)) {
        let dp = cheapest_disjoint_uplink_cover(&inst).unwrap();
        dp.check(&inst, &vertical_cost_table(&inst)).unwrap();
        let brute = brute_uplink_cover(&inst, &OracleBudget::default()).unwrap();
        prop_assert_eq!(dp.weight, brute.weight);
        let sol = dp.to_solution(&inst);
        prop_assert!(sol.covers(&inst));
        prop_assert!(sol.weight <= dp.weight);
    }

    #[test]
    fn two_approx_sandwich(inst in small_instance(8)) {
        let opt = exact_opt(&inst, &OracleBudget::default()).unwrap();
        let base = cheapest_disjoint_uplink_cover(&inst).unwrap();
        let two = greedy::two_approx_only(&inst).unwrap();
        prop_assert!(opt.weight <= two.weight);
        prop_assert!(base.weight <= 2 * opt.weight);
    }

    #[test]
    fn slack_dp_matches_brute(inst in small_instance(7), k in 1usize..=3, rho in rho()) {
        let (cat, u, search) = setup(&inst);
        prop_assume!(search.len() <= 12);
        let dp = slack_max(&cat, &u, k, rho, &search);
        let (brute, _) = brute_max_slack(&cat, &u, k, rho, &search, &OracleBudget::default()).unwrap();
        prop_assert_eq!(dp.slack, brute);
        // the returned set realizes the slack and is admissible
        prop_assert!(is_k_thin(&cat, &dp.component, k));
        let dropped = cat.weight_of(&drop_set(&cat, &u, &dp.component)) as i128;
        let own = cat.weight_of(&dp.component) as i128;
        prop_assert_eq!(dp.slack, rho * Rational::from_integer(dropped) - Rational::from_integer(own));
    }

    #[test]
    fn slack_tables_are_internally_consistent(inst in small_instance(7), k in 1usize..=3, rho in rho()) {
        let (cat, u, search) = setup(&inst);
        let dp = SlackDp::new(&cat, &u, k, rho, &search);
        let tables = dp.build(true);
        prop_assert!(dp.verify(&tables).is_ok(), "{:?}", dp.verify(&tables));
    }

    #[test]
    fn ratio_search_result_is_minimal_and_bounded(inst in small_instance(10), k in 1usize..=3) {
        let (cat, u, search) = setup(&inst);
        prop_assume!(!u.is_empty());
        let (best, trace) = best_ratio_component(&cat, &u, k, &search).unwrap();
        prop_assert!(best.drop_weight > 0);
        prop_assert_eq!(best.rho, Rational::new(best.component_weight as i128, best.drop_weight as i128));
        // every singleton up-link has ratio 1
        prop_assert!(best.rho <= Rational::from_integer(1));
        prop_assert!(trace.iterations <= wtap_core::ratio_search::iteration_bound(cat.weight_of(&u)));
        // no probe at or above rho* says "below"
        for p in &trace.probes {
            prop_assert_eq!(p.at_least, p.rho >= best.rho);
        }
    }

    #[test]
    fn greedy_trace_is_monotone(inst in small_instance(14), k in 1usize..=3, full in any::<bool>()) {
        let options = GreedyOptions { k_override: Some(k), full_shadows: full };
        let (sol, trace) = greedy::solve(&inst, Rational::from_integer(1), &options).unwrap();
        prop_assert!(sol.covers(&inst));
        trace.check().unwrap();
        prop_assert_eq!(trace.initial_weight, cheapest_disjoint_uplink_cover(&inst).unwrap().weight);
    }

    #[test]
    fn decomposition_guarantees(inst in small_instance(11), denom in 1i128..=3) {
        let opt = match exact_opt(&inst, &OracleBudget::default()) {
            Ok(s) => s.links,
            Err(_) => (0..inst.links().len()).collect(),
        };
        let (cat, u, _) = setup(&inst);
        let eps = Rational::new(1, denom);
        let d = decompose(&cat, &opt, &u, eps).unwrap();
        prop_assert!(d.check(&cat, &u, eps).is_ok(), "{:?}", d.check(&cat, &u, eps));
        let report = verify_witness_structure(&cat, &opt, &u);
        prop_assert!(report.all_passed(), "{:?}", report.failures());
    }

    #[test]
    fn serialization_round_trips(inst in small_instance(20)) {
        let once = instance_to_json(&inst);
        let again = instance_to_json(&read_instance(&once).unwrap());
        prop_assert_eq!(once, again);
    }
}

#[test]
fn fig2_small_subsets_never_pay_off() {
    // every set of at most d/2 links drops no more than it costs
    let d = 4;
    let inst = gen_fig2(d, 10);
    let (cat, u, search) = setup(&inst);
    let m = search.len();
    for mask in 1u32..(1 << m) {
        if mask.count_ones() as usize > d / 2 {
            continue;
        }
        let c: Vec<LinkId> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| search[i]).collect();
        assert!(cat.weight_of(&drop_set(&cat, &u, &c)) <= cat.weight_of(&c), "{c:?}");
    }
}

#[test]
fn fig2_odd_width_baseline_matches_brute() {
    let inst = gen_fig2(3, 5);
    let dp = cheapest_disjoint_uplink_cover(&inst).unwrap();
    let brute = brute_uplink_cover(&inst, &OracleBudget::default()).unwrap();
    assert_eq!(dp.weight, brute.weight);
    assert_eq!(exact_opt(&inst, &OracleBudget::default()).unwrap().weight, 18);
}

#[test]
fn bench_greedy_never_worse_than_baseline() {
    let config = BenchConfig {
        seed: 50,
        instances: vec![
            InstanceSource::Random { count: 50, n_min: 2, n_max: 10, links: None, weight_max: 10 },
        ],
        algorithms: vec![
            AlgorithmSpec::Uplink2,
            AlgorithmSpec::Relgreedy { eps: Some("1".into()), k: None, full_shadows: false },
        ],
        exact: true,
        timing: false,
    };
    let report = bench(&config);
    assert_eq!(report.rows.len(), 100);
    for pair in report.rows.chunks(2) {
        let (greedy, base) = (&pair[0], &pair[1]);
        assert!(greedy.algorithm.starts_with("relgreedy") && base.algorithm == "uplink2");
        assert!(greedy.weight.unwrap() <= base.weight.unwrap(), "{greedy:?} vs {base:?}");
    }
}

#[test]
fn bench_fig2_sweep_reaches_optimum() {
    let config = BenchConfig {
        seed: 0,
        instances: vec![InstanceSource::Fig2 { d: vec![2, 4, 6], m: 10 }],
        algorithms: vec![AlgorithmSpec::Relgreedy { eps: None, k: Some(2), full_shadows: false }],
        exact: true,
        timing: false,
    };
    let report = bench(&config);
    for row in &report.rows {
        let d = row.params["d"].as_u64().unwrap();
        assert_eq!(row.weight, Some(d * 10 + d));
        if let Some(x) = row.exact_weight {
            assert_eq!(row.weight, Some(x));
        }
    }
}

#[test]
fn ratio_search_rejects_empty_uplinks() {
    let inst = gen_random(1, 0, 1, 0);
    let (cat, u, search) = setup(&inst);
    assert_eq!(best_ratio_component(&cat, &u, 2, &search).unwrap_err(), wtap_core::SolveError::EmptyU);
}
