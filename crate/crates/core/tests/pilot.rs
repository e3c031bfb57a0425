//! Pilot runs that fix thresholds used elsewhere. Ignored by default:
//! `cargo test -p fairdecomp --test pilot -- --ignored --nocapture`.

use fairdecomp::embedding::{euclidean_embed, measure_distortion, Norm};
use fairdecomp::graph::gen_graph;
use fairdecomp::stats::{estimate_separation, PairSpec};
use fairdecomp::{Algorithm, GraphKind, LddConfig};

/// Upper constant for separation under the embedding decomposition on a
/// 20x20 grid, R = 8, pairs at distance 1..=8 from (6, 6).
#[test]
#[ignore]
fn embed_upper_constant() {
    let g = gen_graph(GraphKind::Grid { w: 20, h: 20 }).unwrap();
    let id = |x: usize, y: usize| y * 20 + x;
    let mut pairs = Vec::new();
    for d in 1..=8 {
        pairs.push((id(6, 6), id(6 + d, 6)));
        pairs.push((id(6, 6), id(6 + d / 2, 6 + d - d / 2)));
    }
    pairs.sort_unstable();
    pairs.dedup();
    let cfg = LddConfig::new(8, Algorithm::Embed).with_seed(1);
    let est = estimate_separation(&g, &cfg, &PairSpec::List(pairs), 3000, 0.99).unwrap();
    for e in &est {
        println!("d {} p_hat {:.4} ratio {:.3}", e.distance, e.p_hat, e.p_hat / e.rho);
    }
    let max = est.iter().map(|e| e.p_hat / e.rho).fold(0.0, f64::max);
    println!("max p_hat / rho = {max:.3}");
}

/// Distortion of the random-subset embedding on a 5x5 grid over seeds 0..10.
#[test]
#[ignore]
fn euclidean_grid5_distortion() {
    let g = gen_graph(GraphKind::Grid { w: 5, h: 5 }).unwrap();
    for seed in 0..10 {
        let e = euclidean_embed(&g, seed).unwrap();
        let rep = measure_distortion(&g, &e.points, Norm::L2).unwrap();
        println!("seed {seed}: distortion {:.3}", rep.distortion);
    }
}
