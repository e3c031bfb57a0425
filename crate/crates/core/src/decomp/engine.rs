//! Phase machinery shared by the KPR family.
//!
//! A phase takes every current component, grows a BFS tree inside it and
//! assigns each member a band index. Edges whose endpoints land in different
//! bands are removed and the components are recomputed. Because all edges
//! between bands go at once, a removed edge always ends up between two
//! different components, so "edge still present" is the same as "endpoints
//! share a component label" and the removed-edge set never needs storing.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::samplers::sample_kappa;
use super::RootPolicy;
use crate::graph::{distances_from, Graph, VertexId};
use crate::rng::SeedTree;

pub(crate) struct Engine<'g> {
    g: &'g Graph,
    /// Component label of each vertex.
    comp: Vec<usize>,
    /// Members of each component, sorted; components ordered by min member.
    members: Vec<Vec<VertexId>>,
    /// For each component, the BFS root of the component it was split from
    /// (`None` before the first phase).
    parent_root: Vec<Option<VertexId>>,
    level: Vec<usize>,
    band: Vec<i64>,
    phase_root: Vec<VertexId>,
    distance_cache: HashMap<VertexId, Vec<usize>>,
}

impl<'g> Engine<'g> {
    pub(crate) fn new(g: &'g Graph) -> Self {
        let n = g.vertex_count();
        let mut engine = Engine {
            g,
            comp: vec![0; n],
            members: Vec::new(),
            parent_root: Vec::new(),
            level: vec![usize::MAX; n],
            band: vec![0; n],
            phase_root: Vec::new(),
            distance_cache: HashMap::new(),
        };
        // Disconnected inputs: every connected component is decomposed on
        // its own, which is what an all-zero band assignment yields.
        engine.refine();
        engine.parent_root = vec![None; engine.members.len()];
        engine
    }

    pub(crate) fn labels(&self) -> &[usize] {
        &self.comp
    }

    /// One KPR phase: cut every BFS edge at a level congruent to a uniform
    /// offset `k` modulo `r`.
    pub(crate) fn kpr_phase(&mut self, phase: SeedTree, r: usize, policy: &RootPolicy) {
        self.run_phase(phase, |ctx, rng| {
            let root = ctx.choose_root(policy, rng);
            ctx.bfs(root);
            let k = rng.random_range(0..r);
            ctx.assign_cut_bands(&[k], r);
            root
        });
    }

    /// One phase of the random-vertex-weights variant. Vertices whose level
    /// is congruent to the offset `theta` move down one level with
    /// probability 1/2, then the bands
    /// `{v : q r + theta < level(v) <= (q + 1) r + theta}` are separated.
    /// Vertices with `level <= theta` form the lowest band (`q = -1`).
    pub(crate) fn randwts_phase(&mut self, phase: SeedTree, r: usize, policy: &RootPolicy) {
        self.run_phase(phase, |ctx, rng| {
            let root = ctx.choose_root(policy, rng);
            ctx.bfs(root);
            let theta = rng.random_range(0..r);
            for &v in ctx.members {
                let mut l = ctx.level[v];
                if l % r == theta && rng.random::<bool>() {
                    l += 1;
                }
                ctx.band[v] = (l as i64 - theta as i64 - 1).div_euclid(r as i64);
            }
            root
        });
    }

    /// One two-cut phase. The root is the member closest, in the original
    /// graph, to the root that created this component (ties to the smaller
    /// id); cuts are made at levels congruent to `k1` and `k1 + ceil(kappa)`.
    pub(crate) fn two_cut_phase(&mut self, phase: SeedTree, r: usize, epsilon: f64) {
        let g = self.g;
        let mut cache = std::mem::take(&mut self.distance_cache);
        self.run_phase(phase, |ctx, rng| {
            let root = match ctx.parent_root {
                Some(prev) => {
                    let dist = match cache.entry(prev) {
                        Entry::Occupied(e) => e.into_mut(),
                        Entry::Vacant(e) => e.insert(distances_from(g, prev)),
                    };
                    *ctx.members
                        .iter()
                        .min_by_key(|&&v| (dist[v], v))
                        .expect("components are non-empty")
                }
                None => ctx.members[0],
            };
            ctx.bfs(root);
            let k1 = rng.random_range(0..r);
            let k2 = sample_kappa(epsilon, r, rng).ceil() as usize;
            ctx.assign_cut_bands(&[k1, (k1 + k2) % r], r);
            root
        });
        self.distance_cache = cache;
    }

    fn run_phase<F>(&mut self, phase: SeedTree, mut per_component: F)
    where
        F: FnMut(&mut PhaseCtx<'_>, &mut ChaCha8Rng) -> VertexId,
    {
        let count = self.members.len();
        self.phase_root.clear();
        for ci in 0..count {
            let mut rng = phase.child(ci as u64).rng();
            let mut ctx = PhaseCtx {
                g: self.g,
                ci,
                comp: &self.comp,
                members: &self.members[ci],
                parent_root: self.parent_root[ci],
                level: &mut self.level,
                band: &mut self.band,
            };
            let root = per_component(&mut ctx, &mut rng);
            self.phase_root.push(root);
        }
        let parents = self.refine();
        self.parent_root = parents.into_iter().map(|p| Some(self.phase_root[p])).collect();
    }

    /// Recomputes components over edges whose endpoints share both component
    /// and band. Returns the old component of each new component.
    fn refine(&mut self) -> Vec<usize> {
        let n = self.g.vertex_count();
        let mut next = vec![usize::MAX; n];
        let mut members = Vec::new();
        let mut parents = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if next[start] != usize::MAX {
                continue;
            }
            let id = members.len();
            let (c, b) = (self.comp[start], self.band[start]);
            next[start] = id;
            queue.push_back(start);
            let mut list = Vec::new();
            while let Some(x) = queue.pop_front() {
                list.push(x);
                for &y in self.g.neighbors(x) {
                    if next[y] == usize::MAX && self.comp[y] == c && self.band[y] == b {
                        next[y] = id;
                        queue.push_back(y);
                    }
                }
            }
            list.sort_unstable();
            members.push(list);
            parents.push(c);
        }
        self.comp = next;
        self.members = members;
        self.band.fill(0);
        parents
    }
}

pub(crate) struct PhaseCtx<'a> {
    g: &'a Graph,
    ci: usize,
    comp: &'a [usize],
    members: &'a [VertexId],
    parent_root: Option<VertexId>,
    level: &'a mut [usize],
    band: &'a mut [i64],
}

impl PhaseCtx<'_> {
    fn choose_root(&self, policy: &RootPolicy, rng: &mut ChaCha8Rng) -> VertexId {
        match policy {
            RootPolicy::MinId => self.members[0],
            RootPolicy::UniformRandom => self.members[rng.random_range(0..self.members.len())],
            RootPolicy::Preference(order) => order
                .iter()
                .copied()
                .find(|&v| v < self.comp.len() && self.comp[v] == self.ci)
                .unwrap_or(self.members[0]),
        }
    }

    fn bfs(&mut self, root: VertexId) {
        for &v in self.members {
            self.level[v] = usize::MAX;
        }
        let mut queue = VecDeque::with_capacity(self.members.len());
        self.level[root] = 0;
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            let next = self.level[x] + 1;
            for &y in self.g.neighbors(x) {
                if self.comp[y] == self.ci && self.level[y] == usize::MAX {
                    self.level[y] = next;
                    queue.push_back(y);
                }
            }
        }
    }

    /// Band of a vertex at level `l` = number of cut edge levels below it.
    fn assign_cut_bands(&mut self, residues: &[usize], r: usize) {
        let mut distinct: Vec<usize> = residues.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        for &v in self.members {
            let l = self.level[v];
            self.band[v] = distinct.iter().map(|&a| ((l + r - 1 - a) / r) as i64).sum();
        }
    }
}
