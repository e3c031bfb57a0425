//! Axis-aligned block decomposition of a grid graph.

use rand::Rng;

use super::{Algorithm, Decomposition, LddConfig};
use crate::error::{invalid, Result};
use crate::graph::{gen_graph, Graph, GraphKind};
use crate::rng::{tag, SeedTree};

/// Cuts a canonical `w x h` grid along columns `{.., l - R, l, l + R, ..}`
/// and rows `{.., m - R, m, m + R, ..}` for offsets `(l, m)` uniform on
/// `{0..R-1}^2`. Clusters are the resulting `R x R` blocks, truncated at the
/// boundary.
pub fn grid_axis_ldd(g: &Graph, w: usize, h: usize, r: usize, seed: u64) -> Result<Decomposition> {
    let cfg = LddConfig::new(r, Algorithm::GridAxis { w, h }).with_seed(seed);
    super::decompose(g, &cfg)
}

pub(super) fn grid_axis_decompose(g: &Graph, w: usize, h: usize, cfg: LddConfig) -> Result<Decomposition> {
    if w == 0 || h == 0 || w * h != g.vertex_count() || *g != gen_graph(GraphKind::Grid { w, h })? {
        return invalid(format!("input is not the canonical {w}x{h} grid"));
    }
    let r = cfg.r as i64;
    let mut rng = SeedTree::new(cfg.seed).child(tag::GRID_OFFSETS).rng();
    let col_offset = rng.random_range(0..r);
    let row_offset = rng.random_range(0..r);
    let keys: Vec<(i64, i64)> = (0..w * h)
        .map(|v| {
            let (i, j) = ((v / w) as i64, (v % w) as i64);
            ((i - row_offset).div_euclid(r), (j - col_offset).div_euclid(r))
        })
        .collect();
    Ok(Decomposition::from_keys(&keys, cfg))
}
