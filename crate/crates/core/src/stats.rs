//! Monte Carlo estimation of separation probabilities and run statistics.
//!
//! Trial `t` of a campaign with master seed `s` runs the decomposition with
//! seed `SeedTree::new(s).child(t).value()`. Trials are independent and
//! their counts are summed, so results do not depend on the worker count.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::decomp::{decompose, Decomposition, LddConfig};
use crate::error::{invalid, Result};
use crate::graph::{distances_from, Graph, VertexId};
use crate::rng::SeedTree;

const RANDOM_PAIRS_TAG: u64 = (1 << 40) + 7;

/// Which vertex pairs a campaign tracks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSpec {
    AllEdges,
    List(Vec<(VertexId, VertexId)>),
    /// `k` distinct-vertex pairs drawn uniformly from the same connected
    /// component, using a stream derived from the master seed.
    Random(usize),
}

/// Estimated separation probability of one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationEstimate {
    pub u: VertexId,
    pub v: VertexId,
    pub distance: usize,
    pub rho: f64,
    pub trials: usize,
    pub hits: usize,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SeparationEstimate {
    fn new(u: VertexId, v: VertexId, distance: usize, r: usize, trials: usize, hits: usize, z: f64) -> Self {
        let p_hat = hits as f64 / trials as f64;
        let (lo, hi) = wilson_interval(hits, trials, z);
        SeparationEstimate {
            u,
            v,
            distance,
            rho: distance as f64 / r as f64,
            trials,
            hits,
            p_hat,
            ci_low: lo.min(p_hat),
            ci_high: hi.max(p_hat),
        }
    }

    /// Largest distance from `p_hat` to an interval end.
    pub fn half_width(&self) -> f64 {
        (self.p_hat - self.ci_low).max(self.ci_high - self.p_hat)
    }

    /// Whether the interval meets `[lo, hi]`.
    pub fn ci_intersects(&self, lo: f64, hi: f64) -> bool {
        self.ci_low <= hi && self.ci_high >= lo
    }
}

/// Two-sided standard normal quantile for a confidence level.
pub fn z_for_confidence(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return invalid(format!("confidence must lie in (0, 1), got {confidence}"));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(1.0 - (1.0 - confidence) / 2.0))
}

/// Wilson score interval for `hits` successes in `trials`.
pub fn wilson_interval(hits: usize, trials: usize, z: f64) -> (f64, f64) {
    assert!(trials >= 1 && hits <= trials, "need 0 <= hits <= trials, trials >= 1");
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if hits == trials { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}

fn resolve_pairs(g: &Graph, pairs: &PairSpec, seed: u64) -> Result<Vec<(VertexId, VertexId)>> {
    match pairs {
        PairSpec::AllEdges => Ok(g.edges().collect()),
        PairSpec::List(list) => {
            for &(u, v) in list {
                g.check_vertex(u)?;
                g.check_vertex(v)?;
            }
            Ok(list.clone())
        }
        PairSpec::Random(k) => {
            let comps = crate::graph::connected_components(g, None);
            let pool: Vec<_> = comps.iter().filter(|c| c.len() >= 2).collect();
            if pool.is_empty() && *k > 0 {
                return invalid("no component with two vertices to draw pairs from");
            }
            let weights: Vec<usize> = pool.iter().map(|c| c.len() * (c.len() - 1)).collect();
            let total: usize = weights.iter().sum();
            let mut rng = SeedTree::new(seed).child(RANDOM_PAIRS_TAG).rng();
            let mut out = Vec::with_capacity(*k);
            for _ in 0..*k {
                let mut pick = rng.random_range(0..total);
                let comp = pool
                    .iter()
                    .zip(&weights)
                    .find(|(_, &w)| {
                        if pick < w {
                            true
                        } else {
                            pick -= w;
                            false
                        }
                    })
                    .map(|(c, _)| c.as_slice())
                    .expect("pick below total weight");
                let a = rng.random_range(0..comp.len());
                let mut b = rng.random_range(0..comp.len() - 1);
                if b >= a {
                    b += 1;
                }
                let (u, v) = (comp[a].min(comp[b]), comp[a].max(comp[b]));
                out.push((u, v));
            }
            Ok(out)
        }
    }
}

fn pair_distances(g: &Graph, pairs: &[(VertexId, VertexId)]) -> Result<Vec<usize>> {
    let mut cache: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    pairs
        .iter()
        .map(|&(u, v)| {
            let d = cache.entry(u).or_insert_with(|| distances_from(g, u))[v];
            if d == usize::MAX {
                invalid(format!("pair ({u}, {v}) lies in different components"))
            } else {
                Ok(d)
            }
        })
        .collect()
}

/// Seed of trial `t` in a campaign with master seed `master`.
pub fn trial_seed(master: u64, t: usize) -> u64 {
    SeedTree::new(master).child(t as u64).value()
}

fn run_trial(g: &Graph, cfg: &LddConfig, t: usize) -> Result<Decomposition> {
    decompose(g, &cfg.clone().with_seed(trial_seed(cfg.seed, t)))
}

/// Runs `f` on a pool with `workers` threads (0 = rayon default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| crate::Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Estimates Pr[pair separated] for each tracked pair over `trials` runs of
/// the decomposition in `cfg` (`cfg.seed` is the master seed).
pub fn estimate_separation(
    g: &Graph,
    cfg: &LddConfig,
    pairs: &PairSpec,
    trials: usize,
    confidence: f64,
) -> Result<Vec<SeparationEstimate>> {
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    cfg.validate()?;
    let z = z_for_confidence(confidence)?;
    let pairs = resolve_pairs(g, pairs, cfg.seed)?;
    let distances = pair_distances(g, &pairs)?;
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<usize>> {
            let d = run_trial(g, cfg, t)?;
            Ok(pairs.iter().map(|&(u, v)| d.separates(u, v) as usize).collect())
        })
        .try_reduce(
            || vec![0; pairs.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    Ok(pairs
        .iter()
        .zip(distances)
        .zip(hits)
        .map(|((&(u, v), d), h)| SeparationEstimate::new(u, v, d, cfg.r, trials, h, z))
        .collect())
}

pub const CSV_HEADER: &str = "u,v,d,rho,trials,hits,p_hat,ci_low,ci_high";

pub fn estimates_to_csv(estimates: &[SeparationEstimate]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for e in estimates {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            e.u, e.v, e.distance, e.rho, e.trials, e.hits, e.p_hat, e.ci_low, e.ci_high
        ));
    }
    out
}

/// Spread of separation probabilities among pairs at the same distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FairnessReport {
    pub distance_class: usize,
    pub pairs: usize,
    pub min_p: f64,
    pub max_p: f64,
    /// `max_p / min_p`; 1 when all are equal, infinite when `min_p = 0 < max_p`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Fixed-width histogram over `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    pub fn new(values: impl IntoIterator<Item = f64>, bin_width: f64) -> Result<Histogram> {
        if !(bin_width > 0.0 && bin_width <= 1.0) {
            return invalid(format!("bin width must lie in (0, 1], got {bin_width}"));
        }
        let count = (1.0 / bin_width - 1e-9).ceil() as usize;
        let mut bins: Vec<HistogramBin> = (0..count)
            .map(|i| HistogramBin {
                lo: i as f64 * bin_width,
                hi: ((i + 1) as f64 * bin_width).min(1.0),
                count: 0,
            })
            .collect();
        for x in values {
            let i = ((x / bin_width + 1e-9).floor() as usize).min(count - 1);
            bins[i].count += 1;
        }
        Ok(Histogram { bin_width, bins })
    }

    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("histogram serializes")
    }
}

/// Groups estimates by distance and reports the min/max ratio per class.
pub fn fairness_report(estimates: &[SeparationEstimate]) -> Result<Vec<FairnessReport>> {
    if estimates.is_empty() {
        return invalid("fairness report needs at least one estimate");
    }
    let mut classes: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for e in estimates {
        classes.entry(e.distance).or_default().push(e.p_hat);
    }
    Ok(classes
        .into_iter()
        .map(|(distance_class, ps)| {
            let min_p = ps.iter().copied().fold(f64::INFINITY, f64::min);
            let max_p = ps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let ratio = if max_p == min_p {
                1.0
            } else if min_p == 0.0 {
                f64::INFINITY
            } else {
                max_p / min_p
            };
            FairnessReport {
                distance_class,
                pairs: ps.len(),
                min_p,
                max_p,
                ratio,
            }
        })
        .collect())
}

/// Outcome of one decomposition run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub trial: usize,
    pub seed: u64,
    pub cluster_count: usize,
    /// `None` when some cluster is disconnected.
    pub max_induced_diameter: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantiles {
    pub mean: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Quantiles {
    /// Linear-interpolation quantiles. Returns `None` for empty input.
    pub fn of(values: &[f64]) -> Option<Quantiles> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.total_cmp(b));
        let at = |q: f64| {
            let pos = q * (v.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Quantiles {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v[0],
            q25: at(0.25),
            median: at(0.5),
            q75: at(0.75),
            max: v[v.len() - 1],
        })
    }
}

/// Aggregate over many runs. Normalized figures divide cluster counts by
/// `n / R` and diameters by `R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunsAggregate {
    pub n: usize,
    pub r: usize,
    pub runs: Vec<RunSummary>,
    pub cluster_count: Quantiles,
    pub normalized_cluster_count: Quantiles,
    /// Over runs whose clusters were all connected.
    pub max_diameter: Option<Quantiles>,
    pub normalized_max_diameter: Option<Quantiles>,
}

impl RunsAggregate {
    /// Fraction of runs with at most `limit` clusters.
    pub fn fraction_with_at_most(&self, limit: f64) -> f64 {
        let ok = self.runs.iter().filter(|r| r.cluster_count as f64 <= limit).count();
        ok as f64 / self.runs.len() as f64
    }

    /// Largest diameter over all runs, if every cluster was connected.
    pub fn overall_max_diameter(&self) -> Option<usize> {
        self.runs
            .iter()
            .map(|r| r.max_induced_diameter)
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }
}

pub fn summarize_runs(g: &Graph, cfg: &LddConfig, trials: usize) -> Result<RunsAggregate> {
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    cfg.validate()?;
    let runs: Vec<RunSummary> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let d = run_trial(g, cfg, t)?;
            Ok(RunSummary {
                trial: t,
                seed: trial_seed(cfg.seed, t),
                cluster_count: d.cluster_count(),
                max_induced_diameter: d.max_induced_diameter(g),
            })
        })
        .collect::<Result<_>>()?;
    let n = g.vertex_count();
    let r = cfg.r;
    let counts: Vec<f64> = runs.iter().map(|s| s.cluster_count as f64).collect();
    let diams: Vec<f64> = runs
        .iter()
        .filter_map(|s| s.max_induced_diameter.map(|d| d as f64))
        .collect();
    let per = n as f64 / r as f64;
    Ok(RunsAggregate {
        n,
        r,
        cluster_count: Quantiles::of(&counts).expect("trials >= 1"),
        normalized_cluster_count: Quantiles::of(&counts.iter().map(|c| c / per).collect::<Vec<_>>())
            .expect("trials >= 1"),
        max_diameter: Quantiles::of(&diams),
        normalized_max_diameter: Quantiles::of(&diams.iter().map(|d| d / r as f64).collect::<Vec<_>>()),
        runs,
    })
}

/// Exact separation probabilities of KPR with smallest-id roots on a path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOracle {
    pub n: usize,
    pub r: usize,
    pub phases: usize,
    /// `sep[u][v]`, symmetric, zero diagonal.
    pub sep: Vec<Vec<f64>>,
}

impl PathOracle {
    pub fn prob(&self, u: VertexId, v: VertexId) -> f64 {
        self.sep[u][v]
    }
}

/// Computes exact KPR separation probabilities on `path(n)` by recursing
/// over every offset choice for every segment.
///
/// On a path, the component holding a pair is always a segment `[a, b]`
/// rooted at `a`, so the probability that `(u, v)` stays together after `p`
/// more phases depends only on `(a, b, p)` and is memoized on that key.
pub fn exact_kpr_path_oracle(n: usize, r: usize, phases: usize) -> Result<PathOracle> {
    if n == 0 || n > 24 || r == 0 || r > 6 || phases == 0 || phases > 3 {
        return invalid(format!(
            "oracle limits: 1 <= n <= 24, 1 <= R <= 6, 1 <= phases <= 3 (got n={n}, R={r}, phases={phases})"
        ));
    }
    let mut memo = BTreeMap::new();
    let together = stay_together(0, n - 1, phases, r, &mut memo);
    let mut sep = vec![vec![0.0; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            sep[u][v] = 1.0 - together[u][v];
            sep[v][u] = sep[u][v];
        }
    }
    Ok(PathOracle { n, r, phases, sep })
}

type Table = Vec<Vec<f64>>;

/// `out[u - a][v - a]`: probability that `u < v` in `[a, b]` are still in
/// one segment after `phases` phases.
fn stay_together(a: usize, b: usize, phases: usize, r: usize, memo: &mut BTreeMap<(usize, usize, usize), Table>) -> Table {
    if let Some(t) = memo.get(&(a, b, phases)) {
        return t.clone();
    }
    let len = b - a + 1;
    let mut out = vec![vec![0.0; len]; len];
    if phases == 0 {
        for row in &mut out {
            row.fill(1.0);
        }
    } else {
        for k in 0..r {
            // Edge (i, i+1) sits at level i - a and is cut when that is k mod r.
            let cuts: Vec<usize> = (a..b).filter(|i| (i - a) % r == k).collect();
            let mut start = a;
            for end in cuts.iter().copied().chain(std::iter::once(b)) {
                let inner = stay_together(start, end, phases - 1, r, memo);
                for u in start..=end {
                    for v in u + 1..=end {
                        out[u - a][v - a] += inner[u - start][v - start] / r as f64;
                    }
                }
                start = end + 1;
            }
        }
    }
    memo.insert((a, b, phases), out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{Algorithm, RootPolicy};
    use crate::graph::{gen_graph, GraphKind};

    #[test]
    fn wilson_reference_value() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.4038).abs() < 5e-5, "{lo}");
        assert!((hi - 0.5962).abs() < 5e-5, "{hi}");
    }

    #[test]
    fn wilson_boundaries() {
        for n in [1, 7, 100, 5000] {
            let (lo, _) = wilson_interval(0, n, 2.576);
            assert_eq!(lo, 0.0);
            let (_, hi) = wilson_interval(n, n, 2.576);
            assert!(hi >= 1.0 - 1.0 / n as f64);
        }
    }

    #[test]
    fn z_values() {
        assert!((z_for_confidence(0.95).unwrap() - 1.959964).abs() < 1e-5);
        assert!((z_for_confidence(0.99).unwrap() - 2.575829).abs() < 1e-5);
        assert!(z_for_confidence(1.0).is_err());
    }

    #[test]
    fn oracle_small_values() {
        let o = exact_kpr_path_oracle(2, 1, 3).unwrap();
        assert_eq!(o.prob(0, 1), 1.0);
        let o = exact_kpr_path_oracle(2, 2, 3).unwrap();
        assert!((o.prob(0, 1) - 0.875).abs() < 1e-12);
        assert!(exact_kpr_path_oracle(25, 2, 3).is_err());
        assert!(exact_kpr_path_oracle(5, 7, 3).is_err());
        assert!(exact_kpr_path_oracle(5, 2, 4).is_err());
    }

    #[test]
    fn oracle_monotone_along_path() {
        let o = exact_kpr_path_oracle(10, 4, 3).unwrap();
        for v in 1..9 {
            assert!(o.prob(0, v) <= o.prob(0, v + 1) + 1e-12, "v {v}");
        }
    }

    #[test]
    fn always_cut_edge() {
        let g = gen_graph(GraphKind::Path(2)).unwrap();
        let cfg = LddConfig::new(1, Algorithm::kpr()).with_seed(4);
        let e = estimate_separation(&g, &cfg, &PairSpec::AllEdges, 100, 0.95).unwrap();
        assert_eq!(e[0].p_hat, 1.0);
        assert_eq!(e[0].hits, 100);
    }

    #[test]
    fn bad_pairs_rejected() {
        let g = gen_graph(GraphKind::Path(3)).unwrap();
        let cfg = LddConfig::new(2, Algorithm::kpr());
        assert!(estimate_separation(&g, &cfg, &PairSpec::List(vec![(0, 7)]), 10, 0.95).is_err());
        assert!(estimate_separation(&g, &cfg, &PairSpec::AllEdges, 0, 0.95).is_err());
        let split = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(estimate_separation(&split, &cfg, &PairSpec::List(vec![(0, 2)]), 10, 0.95).is_err());
    }

    #[test]
    fn random_pairs_are_valid() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let cfg = LddConfig::new(2, Algorithm::kpr()).with_seed(1);
        let est = estimate_separation(&g, &cfg, &PairSpec::Random(50), 5, 0.95).unwrap();
        assert_eq!(est.len(), 50);
        assert!(est.iter().all(|e| e.u < e.v && e.distance >= 1));
    }

    #[test]
    fn fairness_identical_is_one() {
        let mk = |p: f64| SeparationEstimate::new(0, 1, 1, 4, 100, (p * 100.0) as usize, 1.96);
        let r = fairness_report(&[mk(0.3), mk(0.3)]).unwrap();
        assert_eq!(r[0].ratio, 1.0);
        let r = fairness_report(&[mk(0.0), mk(0.3)]).unwrap();
        assert!(r[0].ratio.is_infinite());
        assert!(fairness_report(&[]).is_err());
    }

    #[test]
    fn histogram_bins() {
        let h = Histogram::new([0.0, 0.05, 0.3, 1.0, 0.999], 0.1).unwrap();
        assert_eq!(h.bins.len(), 10);
        assert_eq!(h.total(), 5);
        assert_eq!(h.bins[0].count, 2);
        assert_eq!(h.bins[3].count, 1);
        assert_eq!(h.bins[9].count, 2);
        assert_eq!(Histogram::new([], 0.01).unwrap().bins.len(), 100);
    }

    #[test]
    fn single_vertex_summary() {
        let g = gen_graph(GraphKind::Path(1)).unwrap();
        let cfg = LddConfig::new(3, Algorithm::RandWts).with_roots(RootPolicy::UniformRandom);
        let s = summarize_runs(&g, &cfg, 20).unwrap();
        assert!(s.runs.iter().all(|r| r.cluster_count == 1));
        assert_eq!(s.overall_max_diameter(), Some(0));
    }

    #[test]
    fn quantiles_interpolate() {
        let q = Quantiles::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(q.median, 2.5);
        assert_eq!(q.min, 1.0);
        assert_eq!(q.max, 4.0);
        assert_eq!(q.mean, 2.5);
    }
}
