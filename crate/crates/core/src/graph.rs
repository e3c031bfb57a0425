//! Immutable undirected graphs and the traversal primitives every
//! decomposition is built from.
//!
//! Guarantees proved for the decompositions assume planar input. Planarity
//! is not tested here; [`Graph::planarity_warning`] only checks the
//! `|E| <= 3|V| - 6` necessary condition.

use std::collections::VecDeque;

use crate::error::{invalid, Error, Result};

pub type VertexId = usize;

/// Undirected simple graph in canonical form: sorted, symmetric adjacency
/// lists without loops or parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Duplicate edges are merged; loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Graph> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return invalid(format!("edge ({u}, {v}) out of range for {n} vertices"));
            }
            if u == v {
                return invalid(format!("self-loop at vertex {u}"));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph {
            adjacency,
            labels: None,
        })
    }

    /// Builds a graph from explicit adjacency lists, which must already be
    /// symmetric.
    pub fn from_adjacency(mut adjacency: Vec<Vec<VertexId>>) -> Result<Graph> {
        let n = adjacency.len();
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if let Some(&v) = list.iter().find(|&&v| v >= n || v == u) {
                return invalid(format!("bad neighbor {v} of vertex {u}"));
            }
        }
        for (u, list) in adjacency.iter().enumerate() {
            for &v in list {
                if adjacency[v].binary_search(&u).is_err() {
                    return invalid(format!(
                        "asymmetric adjacency: {v} listed under {u} but not {u} under {v}"
                    ));
                }
            }
        }
        Ok(Graph {
            adjacency,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Graph> {
        if labels.len() != self.vertex_count() {
            return invalid(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.vertex_count()
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.vertex_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Returns a message when the graph is too dense to be planar.
    pub fn planarity_warning(&self) -> Option<String> {
        let n = self.vertex_count();
        let m = self.edge_count();
        if n >= 3 && m > 3 * n - 6 {
            Some(format!(
                "graph has {m} edges on {n} vertices, above the planar limit {}; \
                 decomposition bounds do not apply",
                3 * n - 6
            ))
        } else {
            None
        }
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            invalid(format!(
                "vertex {v} out of range for {} vertices",
                self.vertex_count()
            ))
        }
    }
}

/// A set of vertex ids, stored as a sorted list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet(Vec<VertexId>);

impl VertexSet {
    pub fn new(mut members: Vec<VertexId>) -> Self {
        members.sort_unstable();
        members.dedup();
        VertexSet(members)
    }

    pub fn full(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<VertexId> {
        self.0.first().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<VertexId> {
        self.0
    }

    fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.0 {
            if v < n {
                mask[v] = true;
            }
        }
        mask
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

/// Result of a breadth-first search: levels and BFS-tree parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsLayering {
    pub root: VertexId,
    pub level: Vec<Option<usize>>,
    pub parent: Vec<Option<VertexId>>,
}

impl BfsLayering {
    pub fn reached(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.level
            .iter()
            .enumerate()
            .filter_map(|(v, l)| l.map(|_| v))
    }

    /// Largest level reached.
    pub fn depth(&self) -> usize {
        self.level.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// BFS from `root`, optionally inside the subgraph induced by `restrict`.
pub fn bfs(g: &Graph, root: VertexId, restrict: Option<&VertexSet>) -> Result<BfsLayering> {
    g.check_vertex(root)?;
    let n = g.vertex_count();
    let mask = restrict.map(|s| s.mask(n));
    if let Some(mask) = &mask {
        if !mask[root] {
            return invalid(format!("root {root} is not in the restriction set"));
        }
    }
    let allowed = |v: VertexId| mask.as_ref().is_none_or(|m| m[v]);

    let mut level = vec![None; n];
    let mut parent = vec![None; n];
    let mut queue = VecDeque::new();
    level[root] = Some(0);
    queue.push_back(root);
    while let Some(x) = queue.pop_front() {
        let next = level[x].unwrap() + 1;
        for &y in g.neighbors(x) {
            if level[y].is_none() && allowed(y) {
                level[y] = Some(next);
                parent[y] = Some(x);
                queue.push_back(y);
            }
        }
    }
    Ok(BfsLayering {
        root,
        level,
        parent,
    })
}

/// Unrestricted BFS distances, `usize::MAX` for unreachable vertices.
pub fn distances_from(g: &Graph, root: VertexId) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.vertex_count()];
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Connected components of the subgraph induced by `restrict` (or of the
/// whole graph), ordered by their minimum vertex.
pub fn connected_components(g: &Graph, restrict: Option<&VertexSet>) -> Vec<VertexSet> {
    let n = g.vertex_count();
    let mask = restrict.map_or_else(|| vec![true; n], |s| s.mask(n));
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut members = Vec::new();
        while let Some(x) = stack.pop() {
            members.push(x);
            for &y in g.neighbors(x) {
                if mask[y] && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        components.push(VertexSet::new(members));
    }
    components
}

/// Maximum shortest-path distance inside the subgraph induced by `cluster`.
///
/// Runs a BFS from every member. Returns [`Error::Disconnected`] when the
/// induced subgraph is not connected.
pub fn induced_diameter(g: &Graph, cluster: &VertexSet) -> Result<usize> {
    induced_diameter_slice(g, cluster.as_slice())
}

pub(crate) fn induced_diameter_slice(g: &Graph, members: &[VertexId]) -> Result<usize> {
    if members.len() <= 1 {
        return Ok(0);
    }
    let mut local = LocalIndex::new(g.vertex_count());
    local.assign(members);
    let mut dist = vec![usize::MAX; members.len()];
    let mut queue = VecDeque::new();
    let mut diameter = 0;
    for s in 0..members.len() {
        dist.fill(usize::MAX);
        dist[s] = 0;
        queue.push_back(s);
        let mut seen = 1;
        while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(members[x]) {
                if let Some(ly) = local.get(y) {
                    if dist[ly] == usize::MAX {
                        dist[ly] = dist[x] + 1;
                        diameter = diameter.max(dist[ly]);
                        seen += 1;
                        queue.push_back(ly);
                    }
                }
            }
        }
        if seen != members.len() {
            return Err(Error::Disconnected);
        }
    }
    Ok(diameter)
}

/// All-pairs shortest paths inside the subgraph induced by `members`,
/// indexed by position in `members`. `usize::MAX` marks unreachable pairs.
pub(crate) fn induced_all_pairs(g: &Graph, members: &[VertexId]) -> Vec<Vec<usize>> {
    let mut local = LocalIndex::new(g.vertex_count());
    local.assign(members);
    let k = members.len();
    let mut out = Vec::with_capacity(k);
    let mut queue = VecDeque::new();
    for s in 0..k {
        let mut dist = vec![usize::MAX; k];
        dist[s] = 0;
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(members[x]) {
                if let Some(ly) = local.get(y) {
                    if dist[ly] == usize::MAX {
                        dist[ly] = dist[x] + 1;
                        queue.push_back(ly);
                    }
                }
            }
        }
        out.push(dist);
    }
    out
}

/// Maps global vertex ids to positions in a member list.
pub(crate) struct LocalIndex {
    slot: Vec<usize>,
}

impl LocalIndex {
    pub(crate) fn new(n: usize) -> Self {
        LocalIndex {
            slot: vec![usize::MAX; n],
        }
    }

    pub(crate) fn assign(&mut self, members: &[VertexId]) {
        for (i, &v) in members.iter().enumerate() {
            self.slot[v] = i;
        }
    }

    pub(crate) fn get(&self, v: VertexId) -> Option<usize> {
        match self.slot[v] {
            usize::MAX => None,
            i => Some(i),
        }
    }
}

/// Graph families with canonical vertex numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    /// `0 - 1 - ... - (n-1)`.
    Path(usize),
    /// Row-major `w x h` grid: vertex `(row i, column j)` is `i * w + j`.
    Grid { w: usize, h: usize },
    /// Hub `0` joined to leaves `1..n`.
    Star(usize),
}

pub fn gen_graph(kind: GraphKind) -> Result<Graph> {
    match kind {
        GraphKind::Path(n) => {
            if n == 0 {
                return invalid("path needs at least one vertex");
            }
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            Graph::from_edges(n, &edges)
        }
        GraphKind::Grid { w, h } => {
            if w == 0 || h == 0 {
                return invalid(format!("grid dimensions must be positive, got {w}x{h}"));
            }
            let mut edges = Vec::with_capacity(2 * w * h);
            for i in 0..h {
                for j in 0..w {
                    let v = i * w + j;
                    if j + 1 < w {
                        edges.push((v, v + 1));
                    }
                    if i + 1 < h {
                        edges.push((v, v + w));
                    }
                }
            }
            Graph::from_edges(w * h, &edges)
        }
        GraphKind::Star(n) => {
            if n == 0 {
                return invalid("star needs at least one vertex");
            }
            let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
            Graph::from_edges(n, &edges)
        }
    }
}
