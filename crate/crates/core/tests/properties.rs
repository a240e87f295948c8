use std::collections::{BTreeMap, BTreeSet};

use pfgr_core::calculus::{
    compose_closure, dominates, expr_compare, minimum_necessary_set, Comparison, FpiClaim, Formula, ParamMap,
    ReductionDescriptor, RuntimeExpr, Slack,
};
use pfgr_core::generate::{gen_kcnf, gen_ov, gen_partial_ktree};
use pfgr_core::twdiam::{
    cross_pair_max, cross_pair_max_naive, diameter_td_with, dominance_max_query, CrossConfig, DominanceIndex,
    EngineConfig,
};
use pfgr_core::{diameter_brute, diameter_td, ov_graph_decomposition, ov_to_diameter, sat_to_ov, validate_td};
use proptest::prelude::*;

fn points(dim: usize) -> impl Strategy<Value = Vec<(Vec<i64>, i64)>> {
    prop::collection::vec((prop::collection::vec(0i64..12, dim), -50i64..50), 0..120)
}

fn matrix(cols: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
    prop::collection::vec(prop::collection::vec(1u64..20, cols), 0..40)
}

fn factor() -> impl Strategy<Value = String> {
    prop_oneof![
        (1u32..4).prop_map(|e| format!("n^{e}")),
        (1u32..3, 1u32..4).prop_map(|(p, q)| format!("n^({p}/{q})")),
        Just("log(n)".to_string()),
        (1u32..3).prop_map(|e| format!("log^{e}(n)")),
        Just("log^d(n)".to_string()),
        (1u32..3).prop_map(|q| format!("2^(n/{q})")),
        (1u32..4).prop_map(|e| format!("d^{e}")),
        Just("k".to_string()),
        (1u32..3).prop_map(|e| format!("(n + d)^{e}")),
        Just("log^d(n + d)".to_string()),
    ]
}

fn expr_text() -> impl Strategy<Value = String> {
    let term = prop::collection::vec(factor(), 1..4).prop_map(|fs| fs.join(" * "));
    prop::collection::vec(term, 1..4).prop_map(|ts| ts.join(" + "))
}

fn expr() -> impl Strategy<Value = RuntimeExpr> {
    expr_text().prop_map(|t| RuntimeExpr::parse(&t).unwrap())
}

fn at_least(a: &RuntimeExpr, b: &RuntimeExpr) -> bool {
    matches!(expr_compare(a, b), Comparison::Dominates | Comparison::Equal)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dominance_matches_scan(
        (dim, pts, queries) in (1usize..=4).prop_flat_map(|dim| (
            Just(dim),
            points(dim),
            prop::collection::vec((prop::collection::vec(-1i64..13, dim), prop::collection::vec(any::<bool>(), dim)), 1..20),
        ))
    ) {
        let index = DominanceIndex::new(dim, pts.clone()).unwrap();
        for (t, strict) in &queries {
            let want = pts
                .iter()
                .filter(|(c, _)| (0..dim).all(|k| if strict[k] { c[k] > t[k] } else { c[k] >= t[k] }))
                .map(|&(_, v)| v)
                .max();
            prop_assert_eq!(dominance_max_query(&index, t, strict).unwrap(), want);
        }
    }

    #[test]
    fn cross_pair_max_matches_double_loop(
        (left, right) in (1usize..=6).prop_flat_map(|cols| (matrix(cols), matrix(cols)))
    ) {
        let want = cross_pair_max_naive(&left, &right);
        for crossover_pairs in [0, 4096] {
            let config = CrossConfig { max_dim: 7, crossover_pairs };
            prop_assert_eq!(cross_pair_max(&left, &right, config).value, want);
        }
    }

    #[test]
    fn canonical_form_is_a_fixed_point(text in expr_text()) {
        let e = RuntimeExpr::parse(&text).unwrap();
        let again = RuntimeExpr::parse(&e.to_string()).unwrap();
        prop_assert_eq!(&again, &e);
        prop_assert_eq!(again.to_string(), e.to_string());
    }

    #[test]
    fn compare_is_antisymmetric(a in expr(), b in expr()) {
        let flipped = match expr_compare(&a, &b) {
            Comparison::Dominates => Comparison::Dominated,
            Comparison::Dominated => Comparison::Dominates,
            other => other,
        };
        prop_assert_eq!(expr_compare(&b, &a), flipped);
        prop_assert_eq!(expr_compare(&a, &a), Comparison::Equal);
    }

    #[test]
    fn compare_is_transitive(a in expr(), b in expr(), c in expr()) {
        if at_least(&a, &b) && at_least(&b, &c) {
            prop_assert!(dominates(&a, &c), "{} >= {} >= {}", a, b, c);
        }
    }

    #[test]
    fn necessary_set_is_monotone(
        images in prop::collection::btree_map("[t-w]", prop::collection::btree_set("[a-e]", 0..3), 1..5),
        pick in prop::collection::vec(any::<bool>(), 4),
    ) {
        let entries: BTreeMap<String, Formula> = images
            .iter()
            .map(|(t, srcs)| {
                let text = if srcs.is_empty() { "1".to_string() } else { srcs.iter().cloned().collect::<Vec<_>>().join(" * ") };
                (t.clone(), Formula::parse(&text).unwrap())
            })
            .collect();
        let map = ParamMap::new(entries);
        let all: BTreeSet<String> = images.keys().cloned().collect();
        let some: BTreeSet<String> = all.iter().zip(pick.iter().cycle()).filter(|(_, &p)| p).map(|(t, _)| t.clone()).collect();
        let small = minimum_necessary_set(&map, &some).unwrap();
        let large = minimum_necessary_set(&map, &all).unwrap();
        prop_assert!(small.is_subset(&large));
        let expected: BTreeSet<String> = images.values().flatten().cloned().collect();
        prop_assert_eq!(large, expected);
    }

    #[test]
    fn identity_closure_keeps_claim(text in expr_text()) {
        let bound = RuntimeExpr::parse(&text).unwrap();
        let params: Vec<String> = bound.params().into_iter().collect();
        let names: Vec<&str> = params.iter().map(String::as_str).collect();
        let claim = FpiClaim::new("P", &names, bound, Slack::symbolic("ε"));
        let derived = compose_closure(&ReductionDescriptor::identity_for(&claim), &claim).unwrap();
        prop_assert_eq!(derived, claim);
    }

    #[test]
    fn engine_matches_brute(n in 2usize..90, k in 1usize..=4, keep in 0.0f64..=1.0, seed in any::<u64>()) {
        prop_assume!(n > k);
        let (g, td) = gen_partial_ktree(n, k, keep, seed).unwrap();
        let want = diameter_brute(&g).unwrap();
        prop_assert_eq!(diameter_td(&g, &td).unwrap(), want);
        // Force the dominance method and deep recursion.
        let eager = EngineConfig {
            cross: CrossConfig { max_dim: 7, crossover_pairs: 0 },
            base_min: 0,
            parallel: false,
        };
        prop_assert_eq!(diameter_td_with(&g, &td, &eager).unwrap().0, want);
    }

    #[test]
    fn ov_decomposition_is_valid(n in 1usize..60, d in 1usize..12, plant in any::<bool>(), seed in any::<u64>()) {
        let inst = gen_ov(n, d, plant, seed).unwrap();
        let (g, _) = ov_to_diameter(&inst);
        let report = validate_td(&g, &ov_graph_decomposition(&inst));
        prop_assert!(report.is_valid(), "{}", report);
        prop_assert_eq!(report.width, d + 1);
    }

    #[test]
    fn reductions_are_deterministic(n in 1usize..30, d in 1usize..8, vars in 1usize..10, clauses in 1usize..20, seed in any::<u64>()) {
        let inst = gen_ov(n, d, false, seed).unwrap();
        prop_assert_eq!(ov_to_diameter(&inst), ov_to_diameter(&inst));
        prop_assert_eq!(ov_graph_decomposition(&inst), ov_graph_decomposition(&inst));
        let cnf = gen_kcnf(vars, clauses, 3, seed).unwrap();
        prop_assert_eq!(sat_to_ov(&cnf).unwrap(), sat_to_ov(&cnf).unwrap());
    }
}
