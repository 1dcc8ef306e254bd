use std::collections::BTreeSet;

use lowdeg::basis::SignalScale;
use lowdeg::bounds::excess_gap;
use lowdeg::certificate::{build_dual, XiTable};
use lowdeg::exact::Number;
use lowdeg::graph::{
    automorphism_count, canonicalize, decompose_difference, parse_edge_list, write_edge_list, DecompositionVariant,
    EdgeSpace, LabeledGraph,
};
use lowdeg::measure::permutations;
use lowdeg::models::ModelParams;
use lowdeg::reduction::{mix_statistic, truncate_family, IndicatorFamily};
use proptest::prelude::*;

/// A graph on `n ≤ 6` vertices given by an edge mask.
fn graph() -> impl Strategy<Value = LabeledGraph> {
    (2usize..=6).prop_flat_map(|n| {
        let e = n * (n - 1) / 2;
        (0u64..1 << e).prop_map(move |m| EdgeSpace::new(n).unwrap().graph(m))
    })
}

fn graph_pair() -> impl Strategy<Value = (LabeledGraph, LabeledGraph)> {
    (2usize..=6).prop_flat_map(|n| {
        let e = n * (n - 1) / 2;
        (0u64..1 << e, 0u64..1 << e).prop_map(move |(a, b)| {
            let es = EdgeSpace::new(n).unwrap();
            (es.graph(a), es.graph(b))
        })
    })
}

fn nested_pair() -> impl Strategy<Value = (LabeledGraph, LabeledGraph)> {
    graph_pair().prop_map(|(s, t)| {
        let h = s.cap(&t).unwrap();
        (s, h)
    })
}

fn brute_automorphisms(g: &LabeledGraph) -> u128 {
    // Automorphisms of the edge support; isolated vertices are not counted.
    let vs: Vec<usize> = g.support().into_iter().collect();
    permutations(vs.len())
        .into_iter()
        .filter(|p| {
            let mut map: Vec<usize> = (0..g.n()).collect();
            for (i, &v) in vs.iter().enumerate() {
                map[v] = vs[p[i]];
            }
            g.relabel(&map).edges() == g.edges()
        })
        .count() as u128
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn union_and_intersection_edge_counts((s, t) in graph_pair()) {
        let cup = s.cup(&t).unwrap();
        let cap = s.cap(&t).unwrap();
        prop_assert_eq!(cup.num_edges() + cap.num_edges(), s.num_edges() + t.num_edges());
        prop_assert!(cup.num_vertices() + cap.num_vertices() <= s.num_vertices() + t.num_vertices());
    }

    #[test]
    fn canonical_form_ignores_labels(g in graph(), seed in any::<u64>()) {
        let n = g.n();
        let perms = permutations(n);
        let p = &perms[(seed % perms.len() as u64) as usize];
        let h = g.relabel(p);
        prop_assert_eq!(canonicalize(&g).unwrap(), canonicalize(&h).unwrap());
        prop_assert_eq!(canonicalize(&g).unwrap().to_graph().num_edges(), g.num_edges());
    }

    #[test]
    fn automorphisms_match_brute_force(g in graph()) {
        prop_assert_eq!(automorphism_count(&g).unwrap(), brute_automorphisms(&g));
    }

    #[test]
    fn edge_list_round_trip(g in graph()) {
        // The format implies every vertex of [n], so the parsed graph spans.
        let spanning = LabeledGraph::spanning(g.n(), g.edges().iter().copied()).unwrap();
        prop_assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), spanning);
    }

    #[test]
    fn decompositions_reassemble((s, h) in nested_pair()) {
        let diff: BTreeSet<_> = s.edges().difference(h.edges()).copied().collect();
        for variant in [DecompositionVariant::Sequential, DecompositionVariant::Independent] {
            let d = decompose_difference(&s, &h, variant).unwrap();
            prop_assert_eq!(d.edges(), diff.clone());
            let used: usize = d.cycles.iter().map(Vec::len).sum::<usize>()
                + d.paths.iter().map(|p| p.len() - 1).sum::<usize>();
            prop_assert_eq!(used, diff.len());
        }
        let seq = decompose_difference(&s, &h, DecompositionVariant::Sequential).unwrap();
        prop_assert_eq!(seq.num_paths() as i64, excess_gap(&s, &h));
    }

    #[test]
    fn truncation_is_regularized(n in 1usize..6, raw in proptest::collection::vec(0u8..5, 36)) {
        let palette = [0.0, 1.0, 1.0, 0.5, -2.0];
        let values: Vec<f64> = raw[..n * n].iter().map(|&i| palette[i as usize]).collect();
        let f = IndicatorFamily::new(n, values).unwrap();
        let t = truncate_family(&f);
        prop_assert!(t.is_regularized());
        prop_assert_eq!(truncate_family(&t), t.clone());
        if f.is_indicator() {
            prop_assert_eq!(t, f);
        }
    }

    #[test]
    fn mixed_statistic_is_a_distribution(n in 1usize..10, hit in 0usize..10, lambda in 0.0f64..=1.0) {
        let mut row = vec![0.0; n];
        row[hit % n] = 1.0;
        let g = mix_statistic(&row, lambda).unwrap();
        prop_assert!((g.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(g.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn numbers_round_trip(a in -1000i64..1000, b in 1i64..1000) {
        let x = Number::ratio(a, b);
        prop_assert_eq!(Number::parse(&x.to_string()).unwrap(), x);
    }
}

/// `‖u‖` stays bounded as `n` grows with the other parameters fixed.
#[test]
fn dual_norm_stays_bounded_in_n() {
    let norm = |n: usize| {
        let p = ModelParams::sbm(n, 2, Number::int(1), Number::ratio(2, 5)).unwrap();
        build_dual(&XiTable::<f64>::build(&p, 6, SignalScale::Exact).unwrap())
            .unwrap()
            .norm
    };
    let base = norm(6);
    for n in [8, 10, 12] {
        let v = norm(n);
        assert!(v.is_finite() && v <= 1.5 * base, "n={n}: {v} vs {base}");
    }
}
