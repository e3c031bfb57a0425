use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use fairdecomp::counterexample::{attach_stars, counterexample, marks_from_json};
use fairdecomp::embedding::{euclidean_embed, l1_embed_with_config, measure_distortion, Norm, PointCloud};
use fairdecomp::graph::gen_graph;
use fairdecomp::io::{load_graph, save_graph, GraphFormat};
use fairdecomp::stats::{
    estimate_separation, estimates_to_csv, exact_kpr_path_oracle, fairness_report, summarize_runs,
    with_workers, Histogram, PairSpec,
};
use fairdecomp::{decompose, Algorithm, Graph, GraphKind, LddConfig, RootPolicy};

use crate::args::*;

/// An error caused by a bad flag combination rather than by the run itself.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn run(cli: Cli) -> Result<()> {
    let out = cli.out.as_deref();
    let bytes = match cli.command {
        Command::Gen(a) => gen(&a, out, cli.format)?,
        Command::Decompose(a) => decompose_cmd(&a, cli.seed)?,
        Command::Estimate(a) => estimate(&a, cli.seed)?,
        Command::Summarize(a) => summarize(&a, cli.seed)?,
        Command::Embed(a) => embed(&a, cli.seed, cli.format)?,
        Command::Oracle(a) => oracle(&a)?,
        Command::Repro(a) => repro(&a, cli.seed)?,
    };
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}

struct LoadedGraph {
    graph: Graph,
    raw: Vec<u8>,
}

fn load(path: &Path) -> Result<LoadedGraph> {
    let raw = fs::read(path).with_context(|| format!("reading graph file {}", path.display()))?;
    let graph = load_graph(&raw, GraphFormat::from_path(path))
        .with_context(|| format!("parsing graph file {}", path.display()))?;
    if let Some(w) = graph.planarity_warning() {
        eprintln!("warning: {w}");
    }
    Ok(LoadedGraph { graph, raw })
}

fn gen(a: &GenArgs, out: Option<&Path>, format: Option<OutFormat>) -> Result<Vec<u8>> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| usage(format!("--{flag} is required for this kind")));
    let fmt = match format {
        Some(OutFormat::EdgeList) => GraphFormat::EdgeList,
        Some(OutFormat::Json) => GraphFormat::Json,
        Some(OutFormat::Csv) => return Err(usage("graphs are written as json or edge_list")),
        None => out.map_or(GraphFormat::Json, GraphFormat::from_path),
    };
    let kind = match a.kind {
        GraphKindArg::Path => GraphKind::Path(need(a.n, "n")?),
        GraphKindArg::Star => GraphKind::Star(need(a.n, "n")?),
        GraphKindArg::Grid => GraphKind::Grid {
            w: need(a.w, "w")?,
            h: need(a.h, "h")?,
        },
        GraphKindArg::Counterexample => {
            let mut mg = counterexample(need(a.d, "d")?).map_err(|e| usage(e.to_string()))?;
            if let Some(s) = &a.stars {
                mg = attach_stars(&mg, s[0], s[1], s[2]);
            }
            return Ok(match fmt {
                GraphFormat::Json => mg.to_json().into_bytes(),
                GraphFormat::EdgeList => save_graph(&mg.graph, fmt),
            });
        }
    };
    let g = gen_graph(kind).map_err(|e| usage(e.to_string()))?;
    Ok(save_graph(&g, fmt))
}

fn root_policy(spec: &str, loaded: &LoadedGraph) -> Result<RootPolicy> {
    if spec == "adversarial" {
        let m = marks_from_json(&loaded.raw)
            .ok_or_else(|| anyhow!("--roots adversarial needs a graph file with `marks`"))?;
        return Ok(RootPolicy::Preference(vec![m.r0, m.r1, m.r2]));
    }
    spec.parse().map_err(|e: fairdecomp::Error| usage(e.to_string()))
}

fn config(a: &AlgoArgs, loaded: &LoadedGraph, seed: u64) -> Result<LddConfig> {
    let algorithm = match a.algo {
        AlgoArg::Kpr => Algorithm::Kpr {
            phases: a.phases.unwrap_or(3),
        },
        AlgoArg::KprPlus => Algorithm::Kpr {
            phases: a.phases.unwrap_or(4),
        },
        AlgoArg::Randwts => Algorithm::RandWts,
        AlgoArg::TwoCuts => Algorithm::TwoCuts {
            epsilon: a.eps,
            with_prefix: a.prefix,
        },
        AlgoArg::RandRadius => Algorithm::RandRadius { alpha: a.alpha },
        AlgoArg::MixedRandRadius => Algorithm::MixedRandRadius { alpha: a.alpha },
        AlgoArg::GridAxis => match (a.w, a.h) {
            (Some(w), Some(h)) => Algorithm::GridAxis { w, h },
            (None, None) => {
                let (w, h) = infer_grid_dims(&loaded.graph)
                    .ok_or_else(|| usage("grid_axis needs --w and --h (graph is not a canonical grid)"))?;
                Algorithm::GridAxis { w, h }
            }
            _ => return Err(usage("grid_axis needs both --w and --h")),
        },
        AlgoArg::Embed => Algorithm::Embed,
    };
    let cfg = LddConfig::new(a.r, algorithm)
        .with_roots(root_policy(&a.roots, loaded)?)
        .with_seed(seed);
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

/// Width and height of a row-major grid, read off the neighbours of vertex
/// 0. The decomposition itself checks the whole structure.
fn infer_grid_dims(g: &Graph) -> Option<(usize, usize)> {
    let n = g.vertex_count();
    let w = match g.neighbors(0) {
        [] if n == 1 => 1,
        [1] => n,
        [1, w] => *w,
        [w] => *w,
        _ => return None,
    };
    (w > 0 && n % w == 0).then_some((w, n / w))
}

fn decompose_cmd(a: &DecomposeArgs, seed: u64) -> Result<Vec<u8>> {
    let loaded = load(&a.graph)?;
    let cfg = config(&a.algo, &loaded, seed)?;
    let d = decompose(&loaded.graph, &cfg)?;
    Ok(format!("{}\n", d.to_json()).into_bytes())
}

fn parse_pairs(spec: &str) -> Result<PairSpec> {
    if spec == "edges" {
        return Ok(PairSpec::AllEdges);
    }
    if let Some(k) = spec.strip_prefix("random:") {
        return k
            .parse()
            .map(PairSpec::Random)
            .map_err(|e| usage(format!("bad pair count `{k}`: {e}")));
    }
    spec.split(',')
        .map(|p| {
            let (u, v) = p
                .split_once('-')
                .ok_or_else(|| usage(format!("bad pair `{p}`, expected u-v")))?;
            let id = |s: &str| s.trim().parse().map_err(|e| usage(format!("bad vertex `{s}`: {e}")));
            Ok((id(u)?, id(v)?))
        })
        .collect::<Result<Vec<_>>>()
        .map(PairSpec::List)
}

fn estimate(a: &EstimateArgs, seed: u64) -> Result<Vec<u8>> {
    let pairs = parse_pairs(&a.pairs)?;
    let loaded = load(&a.graph)?;
    let cfg = config(&a.algo, &loaded, seed)?;
    let est = with_workers(a.workers, || {
        estimate_separation(&loaded.graph, &cfg, &pairs, a.trials, a.confidence)
    })??;
    Ok(estimates_to_csv(&est).into_bytes())
}

fn summarize(a: &SummarizeArgs, seed: u64) -> Result<Vec<u8>> {
    let loaded = load(&a.graph)?;
    let cfg = config(&a.algo, &loaded, seed)?;
    let agg = with_workers(a.workers, || summarize_runs(&loaded.graph, &cfg, a.trials))??;
    Ok(format!("{}\n", serde_json::to_string(&agg)?).into_bytes())
}

fn embed(a: &EmbedArgs, seed: u64, format: Option<OutFormat>) -> Result<Vec<u8>> {
    if matches!(format, Some(OutFormat::EdgeList)) {
        return Err(usage("embeddings are written as json or csv"));
    }
    let loaded = load(&a.graph)?;
    let g = &loaded.graph;
    let (cloud, norm): (PointCloud, Norm) = match a.mode {
        EmbedMode::Euclidean => (euclidean_embed(g, seed)?.points, Norm::L2),
        EmbedMode::L1 => {
            let args = AlgoArgs {
                algo: a.algo,
                r: a.r,
                phases: None,
                eps: 0.5,
                prefix: false,
                alpha: 1.0,
                w: None,
                h: None,
                roots: "min_id".into(),
            };
            let cfg = config(&args, &loaded, seed)?;
            let p = with_workers(a.workers, || l1_embed_with_config(g, &cfg, a.m, seed))??;
            (p, Norm::L1)
        }
    };
    let report = measure_distortion(g, &cloud, norm)?;
    eprintln!("{}", serde_json::to_string(&report)?);
    Ok(match format {
        Some(OutFormat::Csv) => cloud.to_csv(),
        _ => format!("{}\n", cloud.to_json()),
    }
    .into_bytes())
}

fn oracle(a: &OracleArgs) -> Result<Vec<u8>> {
    let o = exact_kpr_path_oracle(a.n, a.r, a.phases).map_err(|e| usage(e.to_string()))?;
    let mut out = String::from("u,v,p\n");
    for u in 0..a.n {
        for v in u + 1..a.n {
            out.push_str(&format!("{u},{v},{}\n", o.prob(u, v)));
        }
    }
    Ok(out.into_bytes())
}

fn repro(a: &ReproArgs, seed: u64) -> Result<Vec<u8>> {
    if a.r == 0 {
        return Err(usage("--R must be at least 1"));
    }
    let loaded = load(&a.graph)?;
    let policy = root_policy(&a.roots, &loaded)?;
    let g = &loaded.graph;
    let n = g.vertex_count();
    let r = a.r;
    let bundle = match a.figure {
        Figure::Gaussian => {
            let trials = a.trials.unwrap_or(3000);
            let mut sections = serde_json::Map::new();
            for (name, alg) in [("kpr", Algorithm::kpr()), ("randwts", Algorithm::RandWts)] {
                let cfg = LddConfig::new(r, alg).with_roots(policy.clone()).with_seed(seed);
                let est = with_workers(a.workers, || {
                    estimate_separation(g, &cfg, &PairSpec::AllEdges, trials, 0.99)
                })??;
                let hist = Histogram::new(est.iter().map(|e| e.p_hat), a.bin_width)?;
                let (lo, hi) = (1.0 / (2.0 * r as f64), 3.0 / r as f64);
                let inside = est.iter().filter(|e| e.p_hat >= lo && e.p_hat <= hi).count();
                sections.insert(
                    name.into(),
                    json!({
                        "histogram": hist,
                        "fairness": fairness_report(&est)?,
                        "fraction_in_window": inside as f64 / est.len().max(1) as f64,
                    }),
                );
            }
            json!({
                "figure": "gaussian",
                "R": r,
                "trials": trials,
                "edges": g.edge_count(),
                "window": [1.0 / (2.0 * r as f64), 3.0 / r as f64],
                "kpr": sections["kpr"],
                "randwts": sections["randwts"],
            })
        }
        Figure::Numclusters | Figure::Maxdiam => {
            let trials = a.trials.unwrap_or(200);
            let cfg = LddConfig::new(r, Algorithm::RandWts)
                .with_roots(policy)
                .with_seed(seed);
            let agg = with_workers(a.workers, || summarize_runs(g, &cfg, trials))??;
            if a.figure == Figure::Numclusters {
                let per = n as f64 / r as f64;
                let normalized: Vec<f64> = agg.runs.iter().map(|s| s.cluster_count as f64 / per).collect();
                json!({
                    "figure": "numclusters",
                    "R": r,
                    "n": n,
                    "trials": trials,
                    "normalized_counts": normalized,
                    "quantiles": agg.normalized_cluster_count,
                    "fraction_at_most_n_over_r": agg.fraction_with_at_most(per),
                })
            } else {
                let Some(max_diam) = agg.overall_max_diameter() else {
                    bail!("a randwts cluster was disconnected");
                };
                let normalized: Vec<f64> = agg
                    .runs
                    .iter()
                    .filter_map(|s| s.max_induced_diameter)
                    .map(|d| d as f64 / r as f64)
                    .collect();
                json!({
                    "figure": "maxdiam",
                    "R": r,
                    "trials": trials,
                    "normalized_max_diameters": normalized,
                    "quantiles": agg.normalized_max_diameter,
                    "bound": 43.0 * (r + 1) as f64 / r as f64,
                    "within_bound": max_diam <= 43 * (r + 1),
                })
            }
        }
    };
    Ok(format!("{bundle}\n").into_bytes())
}
