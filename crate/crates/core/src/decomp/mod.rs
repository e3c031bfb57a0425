//! Randomized low-diameter decompositions.
//!
//! All samplers share one randomness layout (see [`crate::rng`]): phase `p`
//! of a run with seed `s` draws component `c`'s choices from stream
//! `(s, p, c)`, where components are numbered by their minimum vertex.
//! Draws that belong to the whole run (the random radius, the mixture coin,
//! the grid offsets) use reserved tags above `2^32`.

mod engine;
mod grid;
mod samplers;

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{induced_diameter_slice, Graph, VertexId};
use crate::rng::{tag, SeedTree};
use engine::Engine;

pub use grid::grid_axis_ldd;
pub use samplers::{sample_kappa, sample_radius};

/// How each phase picks the BFS root inside a component.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum RootPolicy {
    /// The smallest vertex id in the component.
    #[default]
    MinId,
    /// A uniformly random member of the component.
    UniformRandom,
    /// The first listed vertex present in the component, else the smallest id.
    Preference(Vec<VertexId>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    /// KPR with `phases` rounds (3 is classic KPR, 4 is "KPR+").
    Kpr { phases: usize },
    /// KPR with random vertex weights (level jitter).
    RandWts,
    /// One KPR phase followed by two phases with two cuts each, optionally
    /// preceded by a full random-weights run.
    TwoCuts { epsilon: f64, with_prefix: bool },
    /// KPR with a random diameter parameter.
    RandRadius { alpha: f64 },
    /// KPR or random-radius KPR, chosen by a biased coin.
    MixedRandRadius { alpha: f64 },
    /// Axis-aligned block cuts on a `w x h` grid.
    GridAxis { w: usize, h: usize },
    /// KPR followed by random Gaussian slab cuts of an Euclidean embedding
    /// of every cluster. Clusters need not be connected.
    Embed,
}

impl Algorithm {
    pub fn kpr() -> Self {
        Algorithm::Kpr { phases: 3 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Kpr { phases: 3 } => "kpr",
            Algorithm::Kpr { .. } => "kpr_plus",
            Algorithm::RandWts => "randwts",
            Algorithm::TwoCuts { .. } => "two_cuts",
            Algorithm::RandRadius { .. } => "rand_radius",
            Algorithm::MixedRandRadius { .. } => "mixed_rand_radius",
            Algorithm::GridAxis { .. } => "grid_axis",
            Algorithm::Embed => "embed",
        }
    }

    /// Whether every cluster is guaranteed to induce a connected subgraph.
    pub fn connected_clusters(&self) -> bool {
        !matches!(self, Algorithm::Embed)
    }

    /// Hard upper bound on the induced diameter of any cluster, if any.
    pub fn diameter_bound(&self, r: usize) -> Option<usize> {
        match self {
            Algorithm::Kpr { phases } if *phases >= 3 => Some(43 * r),
            Algorithm::Kpr { .. } => None,
            Algorithm::RandWts => Some(43 * (r + 1)),
            Algorithm::TwoCuts { .. } => Some(43 * r),
            Algorithm::RandRadius { .. } | Algorithm::MixedRandRadius { .. } => Some(43 * r),
            Algorithm::GridAxis { .. } => Some(2 * r.saturating_sub(1)),
            Algorithm::Embed => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Kpr { phases: 3 } => write!(f, "kpr"),
            Algorithm::Kpr { phases } => write!(f, "kpr_plus(phases={phases})"),
            Algorithm::RandWts => write!(f, "randwts"),
            Algorithm::TwoCuts {
                epsilon,
                with_prefix,
            } => write!(f, "two_cuts(eps={epsilon},prefix={with_prefix})"),
            Algorithm::RandRadius { alpha } => write!(f, "rand_radius(alpha={alpha})"),
            Algorithm::MixedRandRadius { alpha } => write!(f, "mixed_rand_radius(alpha={alpha})"),
            Algorithm::GridAxis { w, h } => write!(f, "grid_axis(w={w},h={h})"),
            Algorithm::Embed => write!(f, "embed"),
        }
    }
}

/// Everything needed to reproduce one decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct LddConfig {
    /// Diameter parameter.
    pub r: usize,
    pub algorithm: Algorithm,
    pub root_policy: RootPolicy,
    pub seed: u64,
}

impl LddConfig {
    pub fn new(r: usize, algorithm: Algorithm) -> Self {
        LddConfig {
            r,
            algorithm,
            root_policy: RootPolicy::MinId,
            seed: 0,
        }
    }

    pub fn with_roots(mut self, policy: RootPolicy) -> Self {
        self.root_policy = policy;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return invalid("R must be at least 1");
        }
        match self.algorithm {
            Algorithm::Kpr { phases } if phases == 0 => invalid("phases must be at least 1"),
            Algorithm::TwoCuts { epsilon, .. } if !(epsilon > 0.0 && epsilon <= 1.0) => {
                invalid(format!("epsilon must lie in (0, 1], got {epsilon}"))
            }
            Algorithm::RandRadius { alpha } if !(alpha >= 0.0 && alpha.is_finite()) => {
                invalid(format!("alpha must be a finite value >= 0, got {alpha}"))
            }
            Algorithm::MixedRandRadius { alpha } if !(0.0..=1.0).contains(&alpha) => {
                invalid(format!("mixture alpha must lie in [0, 1], got {alpha}"))
            }
            Algorithm::MixedRandRadius { alpha } if alpha == 0.0 && self.r < 2 => {
                invalid("mixture with alpha = 0 needs R >= 2 so that log2(R) > 0")
            }
            Algorithm::Embed if self.r < 2 => invalid("embedding decomposition needs R >= 2"),
            _ => Ok(()),
        }
    }
}

/// A partition of the vertex set into clusters.
///
/// Clusters are sorted internally and ordered by their minimum vertex, so
/// equal partitions compare and serialize identically.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    clusters: Vec<Vec<VertexId>>,
    cluster_of: Vec<usize>,
    config: LddConfig,
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    #[serde(rename = "R")]
    r: usize,
    algorithm: String,
    seed: u64,
    clusters: Vec<Vec<VertexId>>,
}

impl Decomposition {
    /// Groups vertices by key. Cluster ids follow first appearance in vertex
    /// order, which is the canonical min-member order.
    pub(crate) fn from_keys<K: Hash + Eq + Clone>(keys: &[K], config: LddConfig) -> Self {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let mut clusters: Vec<Vec<VertexId>> = Vec::new();
        let mut cluster_of = Vec::with_capacity(keys.len());
        for (v, key) in keys.iter().enumerate() {
            let next = clusters.len();
            let id = *ids.entry(key.clone()).or_insert(next);
            if id == next {
                clusters.push(Vec::new());
            }
            clusters[id].push(v);
            cluster_of.push(id);
        }
        Decomposition {
            clusters,
            cluster_of,
            config,
        }
    }

    pub fn clusters(&self) -> &[Vec<VertexId>] {
        &self.clusters
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, v: VertexId) -> usize {
        self.cluster_of[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.cluster_of
    }

    pub fn config(&self) -> &LddConfig {
        &self.config
    }

    pub fn separates(&self, u: VertexId, v: VertexId) -> bool {
        self.cluster_of[u] != self.cluster_of[v]
    }

    /// Checks that the clusters partition `0..n` and agree with
    /// `cluster_of`.
    pub fn is_partition(&self, n: usize) -> bool {
        if self.cluster_of.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for (id, cluster) in self.clusters.iter().enumerate() {
            if cluster.is_empty() {
                return false;
            }
            for &v in cluster {
                if v >= n || seen[v] || self.cluster_of[v] != id {
                    return false;
                }
                seen[v] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Induced diameter of every cluster; `None` marks a disconnected one.
    pub fn cluster_diameters(&self, g: &Graph) -> Vec<Option<usize>> {
        self.clusters
            .iter()
            .map(|c| induced_diameter_slice(g, c).ok())
            .collect()
    }

    /// Number of clusters whose induced subgraph is disconnected.
    pub fn disconnected_clusters(&self, g: &Graph) -> usize {
        self.cluster_diameters(g).iter().filter(|d| d.is_none()).count()
    }

    /// Largest induced cluster diameter, `None` if some cluster is
    /// disconnected.
    pub fn max_induced_diameter(&self, g: &Graph) -> Option<usize> {
        self.cluster_diameters(g)
            .into_iter()
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DecompositionJson {
            r: self.config.r,
            algorithm: self.config.algorithm.to_string(),
            seed: self.config.seed,
            clusters: self.clusters.clone(),
        })
        .expect("decomposition json serializes")
    }
}

/// Runs the decomposition described by `cfg`.
pub fn decompose(g: &Graph, cfg: &LddConfig) -> Result<Decomposition> {
    cfg.validate()?;
    if let RootPolicy::Preference(order) = &cfg.root_policy {
        for &v in order {
            g.check_vertex(v)?;
        }
    }
    let tree = SeedTree::new(cfg.seed);
    let r = cfg.r;
    let labels = match &cfg.algorithm {
        Algorithm::Kpr { phases } => kpr_labels(g, r, *phases, &cfg.root_policy, tree),
        Algorithm::RandWts => randwts_labels(g, r, &cfg.root_policy, tree),
        Algorithm::TwoCuts {
            epsilon,
            with_prefix,
        } => two_cuts_labels(g, r, *epsilon, *with_prefix, &cfg.root_policy, tree),
        Algorithm::RandRadius { alpha } => rand_radius_labels(g, r, *alpha, &cfg.root_policy, tree),
        Algorithm::MixedRandRadius { alpha } => {
            if mixture_picks_rand_radius(r, *alpha, tree) {
                rand_radius_labels(g, r, *alpha, &cfg.root_policy, tree)
            } else {
                kpr_labels(g, r, 3, &cfg.root_policy, tree)
            }
        }
        Algorithm::GridAxis { w, h } => return grid::grid_axis_decompose(g, *w, *h, cfg.clone()),
        Algorithm::Embed => return crate::embedding::embed_decompose(g, cfg.clone()),
    };
    Ok(Decomposition::from_keys(&labels, cfg.clone()))
}

/// Classic KPR with `phases` rounds.
pub fn kpr(g: &Graph, r: usize, phases: usize, policy: RootPolicy, seed: u64) -> Result<Decomposition> {
    let cfg = LddConfig::new(r, Algorithm::Kpr { phases })
        .with_roots(policy)
        .with_seed(seed);
    decompose(g, &cfg)
}

pub fn kpr_randwts(g: &Graph, r: usize, policy: RootPolicy, seed: u64) -> Result<Decomposition> {
    let cfg = LddConfig::new(r, Algorithm::RandWts)
        .with_roots(policy)
        .with_seed(seed);
    decompose(g, &cfg)
}

/// Two cuts per phase. `policy` only picks the first root of each
/// component; later roots follow the closest-to-previous-root rule.
pub fn kpr_two_cuts(
    g: &Graph,
    r: usize,
    epsilon: f64,
    with_prefix: bool,
    policy: RootPolicy,
    seed: u64,
) -> Result<Decomposition> {
    let cfg = LddConfig::new(
        r,
        Algorithm::TwoCuts {
            epsilon,
            with_prefix,
        },
    )
    .with_roots(policy)
    .with_seed(seed);
    decompose(g, &cfg)
}

pub fn kpr_rand_radius(g: &Graph, r: usize, alpha: f64, policy: RootPolicy, seed: u64) -> Result<Decomposition> {
    let cfg = LddConfig::new(r, Algorithm::RandRadius { alpha })
        .with_roots(policy)
        .with_seed(seed);
    decompose(g, &cfg)
}

pub fn mixed_rand_radius(g: &Graph, r: usize, alpha: f64, policy: RootPolicy, seed: u64) -> Result<Decomposition> {
    let cfg = LddConfig::new(r, Algorithm::MixedRandRadius { alpha })
        .with_roots(policy)
        .with_seed(seed);
    decompose(g, &cfg)
}

/// Probability that the mixture runs random-radius KPR instead of KPR:
/// `alpha` when positive, `1 / log2(r)` when zero.
pub fn mixture_weight(r: usize, alpha: f64) -> f64 {
    if alpha > 0.0 {
        alpha
    } else {
        1.0 / (r as f64).log2()
    }
}

/// The mixture coin for a given seed.
pub fn mixture_uses_rand_radius(r: usize, alpha: f64, seed: u64) -> Result<bool> {
    LddConfig::new(r, Algorithm::MixedRandRadius { alpha }).validate()?;
    Ok(mixture_picks_rand_radius(r, alpha, SeedTree::new(seed)))
}

fn mixture_picks_rand_radius(r: usize, alpha: f64, tree: SeedTree) -> bool {
    let mut rng = tree.child(tag::MIXTURE).rng();
    rng.random::<f64>() < mixture_weight(r, alpha)
}

/// The radius parameter `ceil(radius)` a random-radius run will use.
pub fn rand_radius_parameter(r: usize, alpha: f64, seed: u64) -> usize {
    drawn_radius(r, alpha, SeedTree::new(seed))
}

fn drawn_radius(r: usize, alpha: f64, tree: SeedTree) -> usize {
    let mut rng = tree.child(tag::RADIUS).rng();
    (sample_radius(alpha, r, &mut rng).ceil() as usize).clamp(1, r)
}

pub(crate) fn kpr_labels(g: &Graph, r: usize, phases: usize, policy: &RootPolicy, tree: SeedTree) -> Vec<usize> {
    let mut engine = Engine::new(g);
    for p in 0..phases {
        engine.kpr_phase(tree.child(tag::PHASE_BASE + p as u64), r, policy);
    }
    engine.labels().to_vec()
}

fn randwts_labels(g: &Graph, r: usize, policy: &RootPolicy, tree: SeedTree) -> Vec<usize> {
    let mut engine = Engine::new(g);
    for p in 0..3 {
        engine.randwts_phase(tree.child(tag::PHASE_BASE + p), r, policy);
    }
    engine.labels().to_vec()
}

fn two_cuts_labels(
    g: &Graph,
    r: usize,
    epsilon: f64,
    with_prefix: bool,
    policy: &RootPolicy,
    tree: SeedTree,
) -> Vec<usize> {
    let mut engine = Engine::new(g);
    if with_prefix {
        for p in 0..3 {
            engine.randwts_phase(tree.child(tag::PREFIX_BASE + p), r, policy);
        }
    }
    engine.kpr_phase(tree.child(tag::PHASE_BASE), r, policy);
    for p in 1..=2 {
        engine.two_cut_phase(tree.child(tag::PHASE_BASE + p), r, epsilon);
    }
    engine.labels().to_vec()
}

fn rand_radius_labels(g: &Graph, r: usize, alpha: f64, policy: &RootPolicy, tree: SeedTree) -> Vec<usize> {
    kpr_labels(g, drawn_radius(r, alpha, tree), 3, policy, tree)
}

impl std::str::FromStr for RootPolicy {
    type Err = crate::Error;

    /// `min_id`, `uniform`, or `pref:3,1,2`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min_id" | "min" => Ok(RootPolicy::MinId),
            "uniform" | "uniform_random" | "random" => Ok(RootPolicy::UniformRandom),
            other => match other.strip_prefix("pref:") {
                Some(list) => list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<VertexId>()
                            .map_err(|e| crate::Error::InvalidArgument(format!("bad root `{t}`: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(RootPolicy::Preference),
                None => invalid(format!("unknown root policy `{other}`")),
            },
        }
    }
}
