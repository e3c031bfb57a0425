//! Metric embeddings built from, and feeding, decompositions.
//!
//! * [`euclidean_embed`]: a Bourgain-style random-subset embedding of a
//!   connected graph into ℓ2, scaled to be non-contractive. Distortion is
//!   `O(log n)` in general; the measured value is returned with the points.
//! * [`ldd_via_embedding`]: KPR, then each cluster is embedded, projected on
//!   a Gaussian direction and sliced into slabs of width `R sqrt(log2 R)`.
//! * [`l1_embed_from_ldd`]: stacks `m R` sampled partitions, giving each
//!   cluster a random `±1/m` token per partition.
//! * [`measure_distortion`]: exact all-pairs distortion of a point cloud.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomp::{kpr_labels, Algorithm, Decomposition, LddConfig};
use crate::error::{invalid, Result};
use crate::graph::{connected_components, induced_all_pairs, Graph, VertexId};
use crate::rng::{tag, SeedTree};

/// One point per vertex, all of the same dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, u: VertexId, v: VertexId, norm: Norm) -> f64 {
        let (a, b) = (&self.points[u], &self.points[v]);
        match norm {
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::L2 => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for p in &mut self.points {
            for x in p.iter_mut() {
                *x *= factor;
            }
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("point cloud serializes")
    }

    /// One row per vertex: `vertex,x0,x1,...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex");
        for i in 0..self.dim {
            out.push_str(&format!(",x{i}"));
        }
        out.push('\n');
        for (v, p) in self.points.iter().enumerate() {
            out.push_str(&v.to_string());
            for x in p {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
}

/// All-pairs comparison of embedded and graph distances.
///
/// `scale` is the factor that makes the embedding non-contractive (the
/// inverse of the smallest distance ratio); `distortion` is the largest
/// ratio after scaling. Coincident distinct vertices give an infinite
/// distortion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionReport {
    pub pairs: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub scale: f64,
    /// Largest stretch after scaling; equals `distortion`.
    pub max_expansion: f64,
    /// How far the unscaled embedding contracts: `max(0, 1 - min_ratio)`.
    pub max_contraction_violation: f64,
    pub distortion: f64,
}

impl DistortionReport {
    pub fn is_infinite(&self) -> bool {
        self.distortion.is_infinite()
    }
}

pub fn measure_distortion(g: &Graph, p: &PointCloud, norm: Norm) -> Result<DistortionReport> {
    let n = g.vertex_count();
    if p.len() != n {
        return invalid(format!("{} points for {n} vertices", p.len()));
    }
    let all: Vec<VertexId> = (0..n).collect();
    let dist = induced_all_pairs(g, &all);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut pairs = 0;
    for u in 0..n {
        for v in u + 1..n {
            let d = dist[u][v];
            if d == usize::MAX {
                return invalid("distortion needs a connected graph");
            }
            let ratio = p.distance(u, v, norm) / d as f64;
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Ok(DistortionReport {
            pairs,
            min_ratio: 1.0,
            max_ratio: 1.0,
            scale: 1.0,
            max_expansion: 1.0,
            max_contraction_violation: 0.0,
            distortion: 1.0,
        });
    }
    let (scale, distortion) = if min_ratio > 0.0 {
        (1.0 / min_ratio, max_ratio / min_ratio)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(DistortionReport {
        pairs,
        min_ratio,
        max_ratio,
        scale,
        max_expansion: distortion,
        max_contraction_violation: (1.0 - min_ratio).max(0.0),
        distortion,
    })
}

/// Output of [`euclidean_embed`]: non-contractive points and the measured
/// ℓ2 distortion.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub points: PointCloud,
    pub distortion: f64,
}

/// Bourgain-style embedding of a connected graph into ℓ2.
///
/// For `i = 1..=L` with `L = ceil(log2 n)`, draws `L` random subsets that
/// keep each vertex with probability `2^-i`; each subset `S` contributes the
/// coordinate `d(v, S)`. The result is scaled so that no distance contracts.
/// If two distinct vertices still coincide, Fréchet coordinates `d(v, s)` for
/// every `s` are appended, which makes the map injective.
pub fn euclidean_embed(g: &Graph, seed: u64) -> Result<Embedding> {
    let n = g.vertex_count();
    if n == 0 {
        return invalid("cannot embed an empty graph");
    }
    if connected_components(g, None).len() != 1 {
        return invalid("euclidean_embed needs a connected graph; embed per component");
    }
    if n == 1 {
        return Ok(Embedding {
            points: PointCloud {
                dim: 1,
                points: vec![vec![0.0]],
            },
            distortion: 1.0,
        });
    }
    let all: Vec<VertexId> = (0..n).collect();
    let dist = induced_all_pairs(g, &all);
    let levels = (n as f64).log2().ceil().max(1.0) as u32;
    let mut rng = SeedTree::new(seed).rng();
    let mut coords: Vec<Vec<f64>> = Vec::new();
    for i in 1..=levels {
        let keep = 0.5f64.powi(i as i32);
        for _ in 0..levels {
            let subset: Vec<VertexId> = loop {
                let s: Vec<VertexId> = (0..n).filter(|_| rng.random::<f64>() < keep).collect();
                if !s.is_empty() {
                    break s;
                }
            };
            coords.push(set_distances(g, &subset));
        }
    }
    let mut points = transpose(&coords, n);
    if has_coincident_pair(&points) {
        for row in &dist {
            for (v, p) in points.iter_mut().enumerate() {
                p.push(row[v] as f64);
            }
        }
    }
    let cloud = PointCloud {
        dim: points[0].len(),
        points,
    };
    let report = measure_distortion(g, &cloud, Norm::L2)?;
    Ok(Embedding {
        points: cloud.scaled(report.scale),
        distortion: report.distortion,
    })
}

fn set_distances(g: &Graph, sources: &[VertexId]) -> Vec<f64> {
    let mut dist = vec![usize::MAX; g.vertex_count()];
    let mut queue: VecDeque<VertexId> = sources.iter().copied().collect();
    for &s in sources {
        dist[s] = 0;
    }
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist.into_iter().map(|d| d as f64).collect()
}

fn transpose(columns: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|v| columns.iter().map(|c| c[v]).collect())
        .collect()
}

fn has_coincident_pair(points: &[Vec<f64>]) -> bool {
    let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Slab width `R sqrt(log2 R)`, with `log2 R` floored at 1.
pub fn slab_width(r: usize) -> f64 {
    r as f64 * (r as f64).log2().max(1.0).sqrt()
}

/// LDD through a Euclidean embedding of every KPR cluster. Output clusters
/// may be disconnected.
pub fn ldd_via_embedding(g: &Graph, r: usize, seed: u64) -> Result<Decomposition> {
    crate::decompose(g, &LddConfig::new(r, Algorithm::Embed).with_seed(seed))
}

pub(crate) fn embed_decompose(g: &Graph, cfg: LddConfig) -> Result<Decomposition> {
    let tree = SeedTree::new(cfg.seed);
    let kpr = Decomposition::from_keys(&kpr_labels(g, cfg.r, 3, &cfg.root_policy, tree), cfg.clone());
    let width = slab_width(cfg.r);
    let mut keys = vec![(0usize, 0i64); g.vertex_count()];
    for (ci, members) in kpr.clusters().iter().enumerate() {
        let stream = tree.child(tag::EMBED).child(ci as u64);
        let sub = induced_subgraph(g, members);
        let h = euclidean_embed(&sub, stream.child(0).value())?.points;
        let mut rng = stream.child(1).rng();
        let direction: Vec<f64> = (0..h.dim).map(|_| rng.sample(StandardNormal)).collect();
        let offset = rng.random::<f64>() * width;
        for (local, &v) in members.iter().enumerate() {
            let q: f64 = h.points[local].iter().zip(&direction).map(|(a, b)| a * b).sum();
            keys[v] = (ci, ((q - offset) / width).floor() as i64);
        }
    }
    Ok(Decomposition::from_keys(&keys, cfg))
}

/// Subgraph induced by sorted `members`, relabelled to `0..members.len()`.
pub(crate) fn induced_subgraph(g: &Graph, members: &[VertexId]) -> Graph {
    let mut edges = Vec::new();
    for (i, &v) in members.iter().enumerate() {
        for &w in g.neighbors(v) {
            if w > v {
                if let Ok(j) = members.binary_search(&w) {
                    edges.push((i, j));
                }
            }
        }
    }
    Graph::from_edges(members.len(), &edges).expect("induced subgraph is simple")
}

/// ℓ1 embedding from `m * r` independent partitions.
///
/// Partition `i` is drawn by `sampler(seed_i)`; each of its clusters gets a
/// token `+1/m` or `-1/m` with probability 1/2, and coordinate `i` of a
/// vertex is its cluster's token. Partitions are sampled in parallel from
/// per-index streams, so the output depends only on `seed`.
pub fn l1_embed_from_ldd<F>(sampler: F, n: usize, r: usize, m: usize, seed: u64) -> Result<PointCloud>
where
    F: Fn(u64) -> Result<Decomposition> + Sync,
{
    if m == 0 || r == 0 {
        return invalid("m and R must be at least 1");
    }
    let eta = m * r;
    let token = 1.0 / m as f64;
    let tree = SeedTree::new(seed);
    let columns: Vec<Vec<f64>> = (0..eta)
        .into_par_iter()
        .map(|i| {
            let node = tree.child(i as u64);
            let d = sampler(node.child(0).value())?;
            if !d.is_partition(n) {
                return invalid(format!("sampler returned a non-partition for partition {i}"));
            }
            let mut rng = node.child(1).rng();
            let signs: Vec<f64> = (0..d.cluster_count())
                .map(|_| if rng.random::<bool>() { token } else { -token })
                .collect();
            Ok((0..n).map(|v| signs[d.cluster_of(v)]).collect())
        })
        .collect::<Result<_>>()?;
    Ok(PointCloud {
        dim: eta,
        points: transpose(&columns, n),
    })
}

/// Convenience wrapper running [`l1_embed_from_ldd`] over a configured
/// sampler; the config's own seed is ignored.
pub fn l1_embed_with_config(g: &Graph, cfg: &LddConfig, m: usize, seed: u64) -> Result<PointCloud> {
    cfg.validate()?;
    l1_embed_from_ldd(
        |s| crate::decompose(g, &cfg.clone().with_seed(s)),
        g.vertex_count(),
        cfg.r,
        m,
        seed,
    )
}
