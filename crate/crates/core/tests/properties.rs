use nalgebra::DMatrix;
use proptest::prelude::*;

use supersat_core::counting::{c_exact, count_copies, count_injections, CountLimits};
use supersat_core::graph::{
    build_turan, build_turan_plus_edge, canonical_form, enumerate_graphs, kite,
    labeled_graph_count, read_graph, read_graph6, write_graph, write_graph6, Graph, Guardrails,
};
use supersat_core::harness::{run_campaign, Campaign, CampaignSpec, PeelCampaign};
use supersat_core::pattern::{automorphism_count, chromatic_number, named_pattern, PatternProfile};
use supersat_core::spectral::{peel, spectral_radius, SpectralConfig};
use supersat_core::stability::{
    distance_to_bipartite, distance_to_turan, edit_distance, DistanceMode,
};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |mask| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::new(n, edges).unwrap()
        })
    })
}

fn with_edges(max_n: usize) -> impl Strategy<Value = Graph> {
    graph_strategy(max_n).prop_filter("needs an edge", |g| g.m() > 0)
}

fn permuted(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn rho(g: &Graph) -> f64 {
    if g.m() == 0 {
        return 0.0;
    }
    spectral_radius(g, &SpectralConfig::default()).unwrap().rho
}

fn dense_rho(g: &Graph) -> f64 {
    let n = g.n();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    a.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

fn profile(name: &str) -> PatternProfile {
    let g = if name == "kite" {
        kite()
    } else {
        named_pattern(name).unwrap()
    };
    PatternProfile::new(&g).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radius_matches_dense_solver(g in graph_strategy(12)) {
        let ours = rho(&g);
        let theirs = dense_rho(&g);
        prop_assert!((ours - theirs).abs() < 1e-8, "{ours} vs {theirs}");
    }

    #[test]
    fn radius_between_average_and_max_degree(g in graph_strategy(12)) {
        let r = rho(&g);
        let n = g.n() as f64;
        let m = g.m() as f64;
        prop_assert!(2.0 * m / n <= r + 1e-9);
        prop_assert!(r <= g.max_degree() as f64 + 1e-9);
        prop_assert!(r <= (2.0 * m).sqrt() + 1e-9);
    }

    #[test]
    fn deleting_an_edge_never_raises_radius(g in with_edges(10), pick in any::<prop::sample::Index>()) {
        let (u, v) = g.edges()[pick.index(g.m())];
        let h = g.without_edge(u, v).unwrap();
        prop_assert!(rho(&h) <= rho(&g) + 1e-9);
    }

    #[test]
    fn canonical_form_ignores_labels((g, perm) in permuted(8)) {
        prop_assert_eq!(canonical_form(&g.relabel(&perm)), canonical_form(&g));
    }

    #[test]
    fn text_formats_round_trip(g in graph_strategy(12)) {
        prop_assert_eq!(read_graph(&write_graph(&g)).unwrap(), g.clone());
        prop_assert_eq!(read_graph6(&write_graph6(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn turan_edge_counts(n in 2usize..30, r in 2usize..6) {
        prop_assume!(r <= n);
        let t = build_turan(n, r).unwrap();
        let sizes: Vec<usize> = t.partition.as_ref().unwrap().parts().iter().map(Vec::len).collect();
        let inside: usize = sizes.iter().map(|s| s * (s - 1) / 2).sum();
        prop_assert_eq!(t.graph.m(), n * (n - 1) / 2 - inside);
        prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1] && w[0] - w[1] <= 1));
        prop_assert!(sizes[0] - sizes[r - 1] <= 1);
        prop_assert!(!t.graph.contains_clique(r + 1));

        prop_assume!(n > r);
        let star = build_turan_plus_edge(n, r).unwrap();
        let part = star.partition.as_ref().unwrap();
        prop_assert_eq!(star.graph.m(), t.graph.m() + 1);
        let intra = star.graph.edges().iter().filter(|&&(u, v)| part.is_intra_part(u, v)).count();
        prop_assert_eq!(intra, 1);
        prop_assert_eq!(Some(star.graph.edges().iter().copied().find(|&(u, v)| part.is_intra_part(u, v)).unwrap()), star.added_edge);
    }

    #[test]
    fn chromatic_number_drops_by_at_most_one(g in with_edges(8), pick in any::<prop::sample::Index>()) {
        let (u, v) = g.edges()[pick.index(g.m())];
        let h = g.without_edge(u, v).unwrap();
        let (a, b) = (chromatic_number(&g).unwrap(), chromatic_number(&h).unwrap());
        prop_assert!(b <= a && a <= b + 1);
    }

    #[test]
    fn copies_monotone_and_match_injections(
        g in graph_strategy(8),
        name in prop::sample::select(vec!["K3", "C4", "C5", "kite", "star:3", "K4"]),
        u in 0usize..8,
        v in 0usize..8,
    ) {
        let f = profile(name);
        let copies = count_copies(&g, &f).unwrap();
        let inj = count_injections(&g, &f.graph, &CountLimits::default()).unwrap();
        prop_assert_eq!(f.aut * copies, inj);
        if u != v && u < g.n() && v < g.n() && !g.has_edge(u, v) {
            let bigger = g.with_edge(u, v).unwrap();
            prop_assert!(count_copies(&bigger, &f).unwrap() >= copies);
        }
    }

    #[test]
    fn peel_respects_step_cap(g in with_edges(14), eps in 0.05f64..0.95) {
        let trace = peel(&g, eps, &SpectralConfig::default()).unwrap();
        let removed = trace.steps.len() - 1;
        prop_assert!(removed <= trace.step_cap);
        prop_assert_eq!(trace.step_cap, ((eps * g.m() as f64).floor() as usize).max(1));
        for (i, s) in trace.steps.iter().enumerate() {
            prop_assert_eq!(s.edges, g.m() - i);
        }
        prop_assert_eq!(trace.terminal.m(), g.m() - removed);
        prop_assert!(trace.terminal.is_edge_subgraph_of(&g));
    }

    #[test]
    fn heuristic_never_beats_exact(g in graph_strategy(9), seed in any::<u64>(), r in 2usize..4) {
        let exact = distance_to_turan(&g, r, DistanceMode::Exact).unwrap();
        let heur = distance_to_turan(&g, r, DistanceMode::heuristic(seed)).unwrap();
        prop_assert!(heur.distance >= exact.distance);
        let eb = distance_to_bipartite(&g, DistanceMode::Exact).unwrap();
        let hb = distance_to_bipartite(&g, DistanceMode::heuristic(seed)).unwrap();
        prop_assert!(hb.distance >= eb.distance);
        prop_assert!(eb.distance <= exact.distance || r != 2);
    }

    #[test]
    fn edit_distance_is_symmetric((g, perm) in permuted(9), h in graph_strategy(9)) {
        prop_assume!(g.n() == h.n());
        let id: Vec<usize> = (0..g.n()).collect();
        prop_assert_eq!(edit_distance(&g, &h, &id).unwrap(), edit_distance(&h, &g, &id).unwrap());
        let mut inverse = vec![0; perm.len()];
        for (v, &w) in perm.iter().enumerate() {
            inverse[w] = v;
        }
        prop_assert_eq!(edit_distance(&g, &g.relabel(&perm), &inverse).unwrap(), 0);
    }

    #[test]
    fn constructions_are_at_distance_zero(n in 3usize..12, r in 2usize..4) {
        prop_assume!(r <= n);
        let t = build_turan(n, r).unwrap().graph;
        prop_assert_eq!(distance_to_turan(&t, r, DistanceMode::Exact).unwrap().distance, 0);
        if r == 2 {
            prop_assert_eq!(distance_to_bipartite(&t, DistanceMode::Exact).unwrap().distance, 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn doubling_n_scales_count_by_leading_power(
        name in prop::sample::select(vec!["K3", "K4", "C5", "kite"]),
        k in 20usize..40,
    ) {
        let f = profile(name);
        let n = f.r * k;
        let small = c_exact(n, &f).unwrap();
        let large = c_exact(2 * n, &f).unwrap();
        let ratio = num_traits::ToPrimitive::to_f64(&large).unwrap()
            / num_traits::ToPrimitive::to_f64(&small).unwrap();
        let target = 2f64.powi(f.f as i32 - 2);
        prop_assert!((ratio / target - 1.0).abs() <= 0.1, "{name} n={n}: {ratio} vs {target}");
    }
}

#[test]
fn isomorphism_classes_partition_labeled_graphs() {
    let factorial = |k: usize| (1..=k as u128).product::<u128>();
    for n in 1..=6usize {
        for m in 0..=n * (n - 1) / 2 {
            let classes: Vec<Graph> = enumerate_graphs(n, m, true, &Guardrails::default())
                .unwrap()
                .collect();
            let total: u128 = classes
                .iter()
                .map(|c| {
                    let k = c.n();
                    factorial(n) / (factorial(n - k) * automorphism_count(c).unwrap() as u128)
                })
                .sum();
            let labeled = enumerate_graphs(n, m, false, &Guardrails::default())
                .unwrap()
                .count() as u128;
            assert_eq!(labeled, labeled_graph_count(n, m), "n={n} m={m}");
            assert_eq!(total, labeled, "n={n} m={m}");
        }
    }
}

#[test]
fn campaigns_are_reproducible() {
    let spec = CampaignSpec::new(Campaign::PeelProperties(PeelCampaign {
        instances: 25,
        seed: 7,
        max_seeds: 500,
        n_min: 10,
        n_max: 30,
        ..PeelCampaign::default()
    }));
    let a = run_campaign(&spec).unwrap().to_json().unwrap();
    let b = run_campaign(&CampaignSpec {
        workers: Some(1),
        ..spec.clone()
    })
    .unwrap()
    .to_json()
    .unwrap();
    assert_eq!(a, b);
    let rep = run_campaign(&spec).unwrap();
    assert_eq!(
        rep.to_csv().unwrap(),
        run_campaign(&spec).unwrap().to_csv().unwrap()
    );
}
