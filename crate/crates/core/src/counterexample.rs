//! Planar graphs on which KPR with a fixed root preference never separates
//! a marked pair at distance `d`, for any `R > 2d`.
//!
//! Layout for distance `d` (every "line" is a path of length `d`):
//!
//! * four red lines `u - r1`, `r1 - v`, `v - r2`, `r2 - u` forming a cycle;
//! * a straight line `u - v` through the inside of that cycle;
//! * every interior vertex of the straight line joined to `r1` by a line on
//!   one side and to `r2` by a line on the other;
//! * every vertex on the red cycle joined to `r0`, which sits outside it.
//!
//! This has `6d^2 - 3d + 2` vertices. For `d = 1` it is `K5` minus the edge
//! `r1 r2`. Marked vertices take ids `r0 = 0, r1 = 1, r2 = 2, u = 3, v = 4`,
//! so the adversarial preference order coincides with smallest-id roots.

use serde::{Deserialize, Serialize};

use crate::decomp::{decompose, Algorithm, LddConfig, RootPolicy};
use crate::error::{invalid, Result};
use crate::graph::{distances_from, Graph, VertexId};
use crate::io::GraphJson;
use crate::stats::{estimate_separation, PairSpec, SeparationEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marks {
    pub u: VertexId,
    pub v: VertexId,
    pub r0: VertexId,
    pub r1: VertexId,
    pub r2: VertexId,
    pub d: usize,
}

/// A counterexample graph with its distinguished vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedGraph {
    pub graph: Graph,
    pub marks: Marks,
}

impl MarkedGraph {
    /// Root preference `r0, r1, r2` that realizes the never-separated pair.
    pub fn adversarial_roots(&self) -> RootPolicy {
        RootPolicy::Preference(vec![self.marks.r0, self.marks.r1, self.marks.r2])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MarkedGraphJson {
            graph: GraphJson::from_graph(&self.graph),
            marks: self.marks,
        })
        .expect("marked graph serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<MarkedGraph> {
        let raw: MarkedGraphJson = serde_json::from_slice(bytes)?;
        let graph = raw.graph.into_graph()?;
        let m = raw.marks;
        for v in [m.u, m.v, m.r0, m.r1, m.r2] {
            graph.check_vertex(v)?;
        }
        Ok(MarkedGraph { graph, marks: m })
    }
}

#[derive(Serialize, Deserialize)]
struct MarkedGraphJson {
    #[serde(flatten)]
    graph: GraphJson,
    marks: Marks,
}

/// Reads the `marks` object of a graph JSON file, if it has one.
pub fn marks_from_json(bytes: &[u8]) -> Option<Marks> {
    #[derive(Deserialize)]
    struct OnlyMarks {
        marks: Option<Marks>,
    }
    serde_json::from_slice::<OnlyMarks>(bytes).ok()?.marks
}

struct Builder {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
}

impl Builder {
    fn vertex(&mut self) -> VertexId {
        self.n += 1;
        self.n - 1
    }

    /// Path of `len` edges from `a` to `b`; returns all its vertices.
    fn line(&mut self, a: VertexId, b: VertexId, len: usize) -> Vec<VertexId> {
        let mut verts = vec![a];
        for _ in 1..len {
            let x = self.vertex();
            verts.push(x);
        }
        verts.push(b);
        for w in verts.windows(2) {
            self.edges.push((w[0], w[1]));
        }
        verts
    }
}

pub fn counterexample(d: usize) -> Result<MarkedGraph> {
    if d == 0 {
        return invalid("counterexample distance must be at least 1");
    }
    let mut b = Builder {
        n: 5,
        edges: Vec::new(),
    };
    let (r0, r1, r2, u, v) = (0, 1, 2, 3, 4);

    let mut red = Vec::new();
    for (a, z) in [(u, r1), (r1, v), (v, r2), (r2, u)] {
        let line = b.line(a, z, d);
        // Each corner is the endpoint of two lines; keep it once.
        red.extend_from_slice(&line[..line.len() - 1]);
    }

    let straight = b.line(u, v, d);
    for &x in &straight[1..straight.len() - 1] {
        b.line(x, r1, d);
        b.line(x, r2, d);
    }
    for &x in &red {
        b.line(x, r0, d);
    }

    let graph = Graph::from_edges(b.n, &b.edges)?;
    let mg = MarkedGraph {
        graph,
        marks: Marks {
            u,
            v,
            r0,
            r1,
            r2,
            d,
        },
    };
    debug_assert!(check_marked_distances(&mg));
    Ok(mg)
}

/// `d(u, v) = d` and `r0` is at distance `d` from `u`, `v`, `r1`, `r2`.
pub fn check_marked_distances(mg: &MarkedGraph) -> bool {
    let m = mg.marks;
    let from_u = distances_from(&mg.graph, m.u);
    let from_r0 = distances_from(&mg.graph, m.r0);
    from_u[m.v] == m.d && [m.u, m.v, m.r1, m.r2].iter().all(|&x| from_r0[x] == m.d)
}

/// Hangs `s0`, `s1`, `s2` fresh leaves off `r0`, `r1`, `r2`.
pub fn attach_stars(mg: &MarkedGraph, s0: usize, s1: usize, s2: usize) -> MarkedGraph {
    let mut n = mg.graph.vertex_count();
    let mut edges: Vec<_> = mg.graph.edges().collect();
    for (root, count) in [(mg.marks.r0, s0), (mg.marks.r1, s1), (mg.marks.r2, s2)] {
        for _ in 0..count {
            edges.push((root, n));
            n += 1;
        }
    }
    MarkedGraph {
        graph: Graph::from_edges(n, &edges).expect("star attachment keeps the graph simple"),
        marks: mg.marks,
    }
}

/// Separation estimate for `(u, v)` under four-phase KPR with adversarial
/// roots.
pub fn kpr_plus_bound_check(mg: &MarkedGraph, r: usize, trials: usize, seed: u64) -> Result<SeparationEstimate> {
    if r <= 2 * mg.marks.d {
        return invalid(format!("need R > 2d, got R = {r}, d = {}", mg.marks.d));
    }
    let cfg = LddConfig::new(r, Algorithm::Kpr { phases: 4 })
        .with_roots(mg.adversarial_roots())
        .with_seed(seed);
    let mut est = estimate_separation(
        &mg.graph,
        &cfg,
        &PairSpec::List(vec![(mg.marks.u, mg.marks.v)]),
        trials,
        0.99,
    )?;
    Ok(est.remove(0))
}

/// The KPR+ bound `8 rho^4` on the separation probability.
pub fn kpr_plus_bound(d: usize, r: usize) -> f64 {
    8.0 * (d as f64 / r as f64).powi(4)
}

/// Whether one decomposition separates the marked pair.
pub fn separates_marked(mg: &MarkedGraph, cfg: &LddConfig) -> Result<bool> {
    Ok(decompose(&mg.graph, cfg)?.separates(mg.marks.u, mg.marks.v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::kpr;

    #[test]
    fn d1_is_k5_minus_edge() {
        let mg = counterexample(1).unwrap();
        let g = &mg.graph;
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 9));
        assert_eq!(g.neighbors(0), &[1, 2, 3, 4]);
        assert!(!g.has_edge(1, 2));
        assert!(g.has_edge(3, 4));
    }

    #[test]
    fn sizes_and_distances() {
        for d in 1..=8 {
            let mg = counterexample(d).unwrap();
            let n = mg.graph.vertex_count();
            assert_eq!(n, 6 * d * d - 3 * d + 2);
            assert!(n <= 9 * d * d);
            assert!(check_marked_distances(&mg), "d = {d}");
            assert!(mg.graph.planarity_warning().is_none());
        }
        assert!(counterexample(0).is_err());
    }

    #[test]
    fn stars() {
        let mg = counterexample(2).unwrap();
        assert_eq!(attach_stars(&mg, 0, 0, 0), mg);
        let s = attach_stars(&mg, 5, 3, 2);
        assert_eq!(s.graph.vertex_count(), mg.graph.vertex_count() + 10);
        assert_eq!(s.graph.neighbors(0).len(), mg.graph.neighbors(0).len() + 5);
        assert!(check_marked_distances(&s));
    }

    #[test]
    fn kpr_never_separates_small_cases() {
        for d in 1..=3 {
            let mg = counterexample(d).unwrap();
            for r in 2 * d + 1..=4 * d + 2 {
                for seed in 0..300 {
                    let dcmp = kpr(&mg.graph, r, 3, mg.adversarial_roots(), seed).unwrap();
                    assert!(!dcmp.separates(3, 4), "d {d} R {r} seed {seed}");
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let mg = counterexample(2).unwrap();
        let back = MarkedGraph::from_json(mg.to_json().as_bytes()).unwrap();
        assert_eq!(back, mg);
        assert_eq!(marks_from_json(mg.to_json().as_bytes()), Some(mg.marks));
        let plain = crate::io::load_graph(mg.to_json().as_bytes(), crate::io::GraphFormat::Json).unwrap();
        assert_eq!(plain, mg.graph);
    }

    #[test]
    fn bound_check_requires_r_above_2d() {
        let mg = counterexample(2).unwrap();
        assert!(kpr_plus_bound_check(&mg, 4, 10, 0).is_err());
        assert!((kpr_plus_bound(2, 5) - 0.2048).abs() < 1e-12);
    }
}
