use proptest::prelude::*;

use fairdecomp::embedding::{l1_embed_from_ldd, Norm};
use fairdecomp::graph::{bfs, connected_components, distances_from, gen_graph, induced_diameter, VertexSet};
use fairdecomp::io::{load_graph, save_graph, GraphFormat};
use fairdecomp::stats::wilson_interval;
use fairdecomp::{decompose, Algorithm, Graph, GraphKind, LddConfig, RootPolicy};

/// Grid with a random subset of its edges kept: planar, often disconnected.
fn thinned_grid() -> impl Strategy<Value = Graph> {
    (1usize..7, 1usize..7)
        .prop_flat_map(|(w, h)| {
            let m = 2 * w * h - w - h;
            (Just(w), Just(h), proptest::collection::vec(0u8..10, m))
        })
        .prop_map(|(w, h, keep)| {
            let full = gen_graph(GraphKind::Grid { w, h }).unwrap();
            let edges: Vec<_> = full.edges().zip(keep).filter(|(_, k)| *k < 8).map(|(e, _)| e).collect();
            Graph::from_edges(w * h, &edges).unwrap()
        })
}

/// Random tree plus a few extra chords.
fn tree_plus() -> impl Strategy<Value = Graph> {
    (2usize..30)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<prop::sample::Index>(), n - 1),
                proptest::collection::vec((0..n, 0..n), 0..4),
            )
        })
        .prop_map(|(n, parents, extra)| {
            let mut edges: Vec<_> = parents.iter().enumerate().map(|(i, p)| (i + 1, p.index(i + 1))).collect();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b));
            Graph::from_edges(n, &edges).unwrap()
        })
}

fn any_graph() -> impl Strategy<Value = Graph> {
    prop_oneof![thinned_grid(), tree_plus()]
}

fn connected_algorithm() -> impl Strategy<Value = Algorithm> {
    prop_oneof![
        (1usize..5).prop_map(|phases| Algorithm::Kpr { phases }),
        Just(Algorithm::RandWts),
        (0.05f64..=1.0, any::<bool>()).prop_map(|(epsilon, with_prefix)| Algorithm::TwoCuts { epsilon, with_prefix }),
        (0.0f64..3.0).prop_map(|alpha| Algorithm::RandRadius { alpha }),
        (0.0f64..=1.0).prop_map(|alpha| Algorithm::MixedRandRadius { alpha }),
    ]
}

fn root_policy(n: usize) -> impl Strategy<Value = RootPolicy> {
    prop_oneof![
        Just(RootPolicy::MinId),
        Just(RootPolicy::UniformRandom),
        proptest::collection::vec(0..n, 0..4).prop_map(RootPolicy::Preference),
    ]
}

fn graph_and_config() -> impl Strategy<Value = (Graph, LddConfig)> {
    any_graph().prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), connected_algorithm(), 2usize..9, root_policy(n), any::<u64>()).prop_map(|(g, alg, r, roots, seed)| {
            (g, LddConfig::new(r, alg).with_roots(roots).with_seed(seed))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn decompositions_are_connected_partitions_within_bound((g, cfg) in graph_and_config()) {
        let n = g.vertex_count();
        let d = decompose(&g, &cfg).unwrap();
        prop_assert!(d.is_partition(n));
        for (i, c) in d.clusters().iter().enumerate() {
            prop_assert!(c.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(c.iter().all(|&v| d.cluster_of(v) == i));
        }
        if let Some(w) = d.clusters().windows(2).find(|w| w[0][0] > w[1][0]) {
            prop_assert!(false, "clusters out of order: {:?}", w);
        }
        // KPR with fewer than three phases has no diameter guarantee.
        let bound = cfg.algorithm.diameter_bound(cfg.r).unwrap_or(usize::MAX);
        for diam in d.cluster_diameters(&g) {
            let diam = diam.expect("cluster is connected");
            prop_assert!(diam <= bound);
        }
        let again = decompose(&g, &cfg).unwrap();
        prop_assert_eq!(d.to_json(), again.to_json());
    }

    #[test]
    fn embedding_decomposition_is_a_partition(g in any_graph(), r in 2usize..6, seed in any::<u64>()) {
        let cfg = LddConfig::new(r, Algorithm::Embed).with_seed(seed);
        let d = decompose(&g, &cfg).unwrap();
        prop_assert!(d.is_partition(g.vertex_count()));
        // Disconnected clusters are allowed; counting them must not fail.
        prop_assert!(d.disconnected_clusters(&g) <= d.cluster_count());
        prop_assert_eq!(d.to_json(), decompose(&g, &cfg).unwrap().to_json());
    }

    #[test]
    fn grid_axis_blocks(w in 1usize..12, h in 1usize..12, r in 1usize..6, seed in any::<u64>()) {
        let g = gen_graph(GraphKind::Grid { w, h }).unwrap();
        let d = decompose(&g, &LddConfig::new(r, Algorithm::GridAxis { w, h }).with_seed(seed)).unwrap();
        prop_assert!(d.is_partition(w * h));
        for diam in d.cluster_diameters(&g) {
            prop_assert!(diam.unwrap() <= 2 * (r - 1));
        }
    }

    #[test]
    fn bfs_levels_are_distances(g in any_graph(), root_pick in any::<prop::sample::Index>()) {
        let n = g.vertex_count();
        let root = root_pick.index(n);
        let layer = bfs(&g, root, None).unwrap();
        let dist = distances_from(&g, root);
        prop_assert_eq!(layer.level[root], Some(0));
        for v in 0..n {
            match layer.level[v] {
                Some(l) => {
                    prop_assert_eq!(l, dist[v]);
                    if v != root {
                        let p = layer.parent[v].unwrap();
                        prop_assert!(g.has_edge(p, v));
                        prop_assert_eq!(layer.level[p], Some(l - 1));
                    }
                }
                None => prop_assert_eq!(dist[v], usize::MAX),
            }
        }
        for (a, b) in g.edges() {
            if let (Some(x), Some(y)) = (layer.level[a], layer.level[b]) {
                prop_assert!(x.abs_diff(y) <= 1);
            }
        }
        let comp = connected_components(&g, None).into_iter().find(|c| c.contains(root)).unwrap();
        prop_assert_eq!(layer.reached().collect::<Vec<_>>(), comp.into_vec());
    }

    #[test]
    fn components_partition_restriction(g in any_graph(), mask in proptest::collection::vec(any::<bool>(), 36)) {
        let n = g.vertex_count();
        let restrict: VertexSet = (0..n).filter(|&v| mask[v % mask.len()]).collect();
        let comps = connected_components(&g, Some(&restrict));
        let mut all: Vec<usize> = comps.iter().flat_map(|c| c.iter()).collect();
        all.sort_unstable();
        prop_assert_eq!(&all[..], restrict.as_slice());
        let mut which = vec![usize::MAX; n];
        for (i, c) in comps.iter().enumerate() {
            for v in c.iter() {
                which[v] = i;
            }
        }
        // Maximal: no kept edge joins two components.
        for (a, b) in g.edges() {
            if restrict.contains(a) && restrict.contains(b) {
                prop_assert_eq!(which[a], which[b]);
            }
        }
        for c in &comps {
            let diam = induced_diameter(&g, c).unwrap();
            let ecc = c
                .iter()
                .map(|v| bfs(&g, v, Some(c)).unwrap().depth())
                .max()
                .unwrap();
            prop_assert_eq!(diam, ecc);
        }
    }

    #[test]
    fn io_round_trip(g in any_graph()) {
        for fmt in [GraphFormat::EdgeList, GraphFormat::Json] {
            let back = load_graph(&save_graph(&g, fmt), fmt).unwrap();
            prop_assert_eq!(&back, &g);
        }
    }

    #[test]
    fn l1_distances_count_separations(g in tree_plus(), r in 1usize..4, m in 1usize..9, seed in any::<u64>()) {
        let n = g.vertex_count();
        let sampler = |s| decompose(&g, &LddConfig::new(r, Algorithm::kpr()).with_seed(s));
        let p = l1_embed_from_ldd(sampler, n, r, m, seed).unwrap();
        prop_assert_eq!(p.dim, m * r);
        let again = l1_embed_from_ldd(sampler, n, r, m, seed).unwrap();
        prop_assert_eq!(&p, &again);
        for u in 0..n {
            for v in u + 1..n {
                let units = p.distance(u, v, Norm::L1) / (2.0 / m as f64);
                prop_assert!((units - units.round()).abs() < 1e-6);
                prop_assert!(units.round() >= 0.0 && units.round() <= (m * r) as f64);
            }
        }
    }

    #[test]
    fn wilson_brackets_estimate(trials in 1usize..5000, frac in 0.0f64..=1.0, z in 0.5f64..4.0) {
        let hits = ((trials as f64) * frac).round() as usize;
        let (lo, hi) = wilson_interval(hits, trials, z);
        let p = hits as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12);
        prop_assert!(p <= hi + 1e-12 && hi <= 1.0);
    }
}

#[test]
fn generated_graphs_pass_planarity_sanity() {
    for kind in [GraphKind::Path(50), GraphKind::Grid { w: 30, h: 30 }, GraphKind::Star(20)] {
        assert!(gen_graph(kind).unwrap().planarity_warning().is_none());
    }
    let k6: Vec<_> = (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).collect();
    assert!(Graph::from_edges(6, &k6).unwrap().planarity_warning().is_some());
}
