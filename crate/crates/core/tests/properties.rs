mod common;

use fairdiv::bench::{aggregate, run_comparison, CaseResult, RunConfig};
use fairdiv::mms::{allocate_mms34_completed, complete_leftovers, mms_exact, mms_ratio};
use fairdiv::{
    allocate_leximin, allocate_maxsum, allocate_mms34, allocate_propm, check_propm, utilities,
    Allocation, Instance, EPS,
};
use proptest::prelude::*;

fn instance(
    agents: std::ops::RangeInclusive<usize>,
    items: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Instance> {
    (agents, items).prop_flat_map(|(n, m)| {
        prop::collection::vec(prop::collection::vec(0u32..=100, m), n).prop_map(|rows| {
            let v = rows
                .into_iter()
                .map(|r| r.into_iter().map(f64::from).collect())
                .collect();
            Instance::from_matrix("prop", v).unwrap()
        })
    })
}

fn sum_min(inst: &Instance, a: &Allocation) -> (f64, f64) {
    let u = utilities(inst, a).unwrap();
    (u.sum().unwrap(), u.min().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn utilities_are_linear_in_values(inst in instance(1..=4, 0..=8), scale in 0.5f64..4.0) {
        let a = allocate_propm(&inst);
        let scaled = Instance::from_matrix(
            "s",
            inst.valuations.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect(),
        ).unwrap();
        let u = utilities(&inst, &a).unwrap();
        let us = utilities(&scaled, &a).unwrap();
        for (x, y) in u.0.iter().zip(&us.0) {
            prop_assert!((x * scale - y).abs() < 1e-9);
        }
    }

    #[test]
    fn min_is_at_most_average(inst in instance(1..=4, 0..=8)) {
        let n = inst.n_agents() as f64;
        for a in [allocate_maxsum(&inst), allocate_propm(&inst), allocate_mms34(&inst).0, allocate_leximin(&inst).unwrap()] {
            let (s, m) = sum_min(&inst, &a);
            prop_assert!(m <= s / n + 1e-9);
        }
    }

    #[test]
    fn maxsum_is_a_welfare_upper_bound(inst in instance(1..=4, 0..=10)) {
        let best = sum_min(&inst, &allocate_maxsum(&inst)).0;
        for a in [allocate_propm(&inst), allocate_mms34_completed(&inst).0, allocate_leximin(&inst).unwrap()] {
            prop_assert!(sum_min(&inst, &a).0 <= best + 1e-7);
        }
    }

    #[test]
    fn leximin_is_complete(inst in instance(1..=4, 0..=8)) {
        let a = allocate_leximin(&inst).unwrap();
        for j in 0..inst.n_items() {
            prop_assert!((a.column_sum(j) - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn mms_is_below_proportional_share(inst in instance(1..=4, 0..=10)) {
        for i in 0..inst.n_agents() {
            let mms = mms_exact(&inst, i).unwrap().value;
            prop_assert!(mms <= inst.total_value(i) / inst.n_agents() as f64 + EPS);
        }
    }

    #[test]
    fn mms_grows_with_items(inst in instance(1..=4, 0..=9), extra in prop::collection::vec(0u32..=100, 4)) {
        let grown = Instance::from_matrix(
            "g",
            inst.valuations.iter().enumerate().map(|(i, r)| {
                let mut r = r.clone();
                r.push(f64::from(extra[i]));
                r
            }).collect(),
        ).unwrap();
        for i in 0..inst.n_agents() {
            prop_assert!(mms_exact(&grown, i).unwrap().value >= mms_exact(&inst, i).unwrap().value);
        }
    }

    #[test]
    fn mms_grows_when_an_agent_leaves(inst in instance(2..=5, 0..=10)) {
        let fewer = Instance::from_matrix("f", inst.valuations[1..].to_vec()).unwrap();
        for i in 1..inst.n_agents() {
            prop_assert!(mms_exact(&fewer, i - 1).unwrap().value >= mms_exact(&inst, i).unwrap().value);
        }
    }

    #[test]
    fn mms_scales(inst in instance(1..=4, 0..=9), k in 1u32..=7) {
        let k = f64::from(k);
        let scaled = Instance::from_matrix(
            "k",
            inst.valuations.iter().map(|r| r.iter().map(|x| x * k).collect()).collect(),
        ).unwrap();
        for i in 0..inst.n_agents() {
            prop_assert_eq!(mms_exact(&scaled, i).unwrap().value, k * mms_exact(&inst, i).unwrap().value);
        }
    }

    #[test]
    fn mms34_guarantee(inst in instance(1..=5, 0..=12)) {
        let (a, _) = allocate_mms34(&inst);
        for r in mms_ratio(&inst, &a).unwrap() {
            prop_assert!(r >= 0.75 - EPS, "{:?}", inst.valuations);
        }
    }

    #[test]
    fn mms34_trace_replays(inst in instance(1..=5, 0..=12)) {
        let (a, trace) = allocate_mms34(&inst);
        prop_assert_eq!(trace.replay(&inst), a.clone());
        prop_assert_eq!(trace.pre_completion_utilities, utilities(&inst, &a).unwrap().0);
    }

    #[test]
    fn completion_is_idempotent(inst in instance(1..=5, 0..=12)) {
        let (partial, _) = allocate_mms34(&inst);
        let once = complete_leftovers(&inst, &partial).unwrap();
        prop_assert!(once.is_complete());
        prop_assert_eq!(complete_leftovers(&inst, &once).unwrap(), once);
    }

    #[test]
    fn propm_holds(inst in instance(1..=7, 0..=14)) {
        let a = allocate_propm(&inst);
        let cert = check_propm(&inst, &a).unwrap();
        prop_assert!(cert.is_valid(), "{:?} {:?}", inst.valuations, cert);
    }

    #[test]
    fn aggregation_ignores_order(
        rows in prop::collection::vec((0usize..20, 0usize..4, 1usize..6, 0u32..1000, 0u32..1000), 1..40),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let algs = fairdiv::Algorithm::ALL;
        let mut results: Vec<CaseResult> = rows.iter().map(|&(c, a, n, s, m)| CaseResult {
            case_id: format!("c{c}"),
            algorithm: algs[a],
            n_agents: n,
            sum_utility: f64::from(s) / 7.0,
            min_utility: f64::from(m) / 7.0,
            runtime_ms: 0,
        }).collect();
        let before = aggregate(&results);
        results.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(aggregate(&results), before);
    }
}

fn strip_runtime(mut rs: Vec<CaseResult>) -> Vec<CaseResult> {
    for r in &mut rs {
        r.runtime_ms = 0;
    }
    rs
}

#[test]
fn parallel_equals_sequential() {
    let cases = common::random_corpus(21, 120, 1..=6, 0..=12, 100);
    let run = |workers| {
        let config = RunConfig {
            workers,
            oracle_audit: true,
            ..RunConfig::default()
        };
        strip_runtime(run_comparison(&cases, &config).unwrap().results)
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn overall_mean_is_weighted_mean_of_groups() {
    let cases = common::random_corpus(22, 90, 1..=5, 0..=10, 100);
    let out = run_comparison(&cases, &RunConfig::default()).unwrap();
    let report = aggregate(&out.results);
    for o in &report.overall {
        let groups: Vec<_> = report
            .groups
            .iter()
            .filter(|g| g.algorithm == o.algorithm)
            .collect();
        let total: usize = groups.iter().map(|g| g.n_cases).sum();
        let weighted: f64 = groups
            .iter()
            .map(|g| g.mean_sum * g.n_cases as f64)
            .sum::<f64>()
            / total as f64;
        assert_eq!(total, o.n_cases);
        assert!((weighted - o.mean_sum).abs() < 1e-9);
    }
}
