//! Graph file formats.
//!
//! * Edge list: UTF-8 text, one `u v` pair per line, `#` comments. The
//!   vertex count is one more than the largest id, or the value of a
//!   `# vertices: N` comment when that is larger (the writer emits one so
//!   trailing isolated vertices survive a round trip).
//! * JSON: `{"n": int, "edges": [[u, v], ...], "labels": [string]?}` with
//!   each undirected pair listed once. An `"adjacency": [[...], ...]` field
//!   may replace `"edges"`; it must be symmetric.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    Json,
}

impl std::str::FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge_list" | "edgelist" | "txt" => Ok(GraphFormat::EdgeList),
            "json" => Ok(GraphFormat::Json),
            other => invalid(format!("unknown graph format `{other}`")),
        }
    }
}

impl GraphFormat {
    /// Guess from a file extension; anything but `.json` is an edge list.
    pub fn from_path(path: &std::path::Path) -> GraphFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => GraphFormat::Json,
            _ => GraphFormat::EdgeList,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct GraphJson {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[VertexId; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<Vec<Vec<VertexId>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl GraphJson {
    pub(crate) fn from_graph(g: &Graph) -> Self {
        GraphJson {
            n: g.vertex_count(),
            edges: Some(g.edges().map(|(u, v)| [u, v]).collect()),
            adjacency: None,
            labels: g.labels().map(<[String]>::to_vec),
        }
    }

    pub(crate) fn into_graph(self) -> Result<Graph> {
        let g = match (self.edges, self.adjacency) {
            (Some(_), Some(_)) => return invalid("give either `edges` or `adjacency`, not both"),
            (_, Some(adj)) => {
                if adj.len() != self.n {
                    return invalid(format!("adjacency has {} rows, n = {}", adj.len(), self.n));
                }
                Graph::from_adjacency(adj)?
            }
            (edges, None) => {
                let edges: Vec<_> = edges
                    .unwrap_or_default()
                    .into_iter()
                    .map(|[u, v]| (u, v))
                    .collect();
                Graph::from_edges(self.n, &edges)?
            }
        };
        match self.labels {
            Some(labels) => g.with_labels(labels),
            None => Ok(g),
        }
    }
}

pub fn load_graph(bytes: &[u8], format: GraphFormat) -> Result<Graph> {
    match format {
        GraphFormat::Json => serde_json::from_slice::<GraphJson>(bytes)?.into_graph(),
        GraphFormat::EdgeList => parse_edge_list(bytes),
    }
}

pub fn save_graph(g: &Graph, format: GraphFormat) -> Vec<u8> {
    match format {
        GraphFormat::Json => {
            serde_json::to_vec(&GraphJson::from_graph(g)).expect("graph json serializes")
        }
        GraphFormat::EdgeList => {
            let mut out = format!("# vertices: {}\n", g.vertex_count());
            for (u, v) in g.edges() {
                out.push_str(&format!("{u} {v}\n"));
            }
            out.into_bytes()
        }
    }
}

fn parse_edge_list(bytes: &[u8]) -> Result<Graph> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        line: 1 + bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count(),
        msg: "invalid UTF-8".into(),
    })?;
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let parse_err = |msg: String| Error::Parse { line: idx + 1, msg };
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(count) = comment.trim().strip_prefix("vertices:") {
                let count = count
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| parse_err(format!("bad vertex count: {e}")))?;
                n = n.max(count);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next_id = |what: &str| -> Result<VertexId> {
            let tok = fields
                .next()
                .ok_or_else(|| parse_err(format!("missing {what} endpoint")))?;
            tok.parse::<VertexId>()
                .map_err(|e| parse_err(format!("bad vertex id `{tok}`: {e}")))
        };
        let u = next_id("first")?;
        let v = next_id("second")?;
        if fields.next().is_some() {
            return Err(parse_err("expected exactly two ids".into()));
        }
        if u == v {
            return Err(parse_err(format!("self-loop at vertex {u}")));
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges)
}
