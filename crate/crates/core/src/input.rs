//! Graph input: a JSON object or a plain edge list.
//!
//! JSON form:
//!
//! ```json
//! {"vertices": 4, "edges": [[1,2],[2,3],[2,4],[3,4]],
//!  "tree": [[1,2],[2,3],[2,4]], "root": 1,
//!  "adjacency_order": [[2],[1,3,4],[2,4],[2,3]]}
//! ```
//!
//! `tree`, `root` and `adjacency_order` are optional; `adjacency_order[v-1]`
//! lists the neighbours of `v` in traversal order. The edge-list form has one
//! `i j` pair per line; `#` starts a comment and the vertex count is the
//! largest label seen.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph_model::{Edge, Graph, GraphError, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("input contains no edges")]
    Empty,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGraph {
    pub vertices: usize,
    pub edges: Vec<[Vertex; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<Vec<[Vertex; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<Vertex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency_order: Option<Vec<Vec<Vertex>>>,
}

impl RawGraph {
    pub fn from_graph(graph: &Graph) -> Self {
        RawGraph {
            vertices: graph.vertex_count(),
            edges: graph.edges().iter().map(|&e| e.into()).collect(),
            tree: None,
            root: None,
            adjacency_order: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }
}

/// A validated graph plus optional tree and root requests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphInput {
    pub graph: Graph,
    pub tree: Option<Vec<Edge>>,
    pub root: Option<Vertex>,
}

impl TryFrom<RawGraph> for GraphInput {
    type Error = InputError;

    fn try_from(raw: RawGraph) -> Result<Self, InputError> {
        let mut graph = Graph::new(raw.vertices, raw.edges.iter().map(|e| (e[0], e[1])))?;
        if let Some(order) = raw.adjacency_order {
            graph = graph.with_adjacency_order(order)?;
        }
        let tree = raw
            .tree
            .map(|t| {
                t.iter()
                    .map(|e| Edge::try_new(e[0], e[1]).ok_or(GraphError::Loop(e[0])))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        Ok(GraphInput {
            graph,
            tree,
            root: raw.root,
        })
    }
}

/// Dispatches on the first non-blank character: `{` means JSON.
pub fn parse_input(text: &str) -> Result<GraphInput, InputError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_edge_list(text)
    }
}

pub fn parse_json(text: &str) -> Result<GraphInput, InputError> {
    let raw: RawGraph = serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
    raw.try_into()
}

pub fn parse_edge_list(text: &str) -> Result<GraphInput, InputError> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = line.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let err = |message: String| InputError::Line { line: line_no, message };
        if fields.len() != 2 {
            return Err(err(format!("expected two vertex labels, found {:?}", content)));
        }
        let mut pair = [0; 2];
        for (slot, f) in pair.iter_mut().zip(&fields) {
            *slot = f
                .parse::<Vertex>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| err(format!("{f:?} is not a positive vertex label")))?;
        }
        if pair[0] == pair[1] {
            return Err(err(format!("loop at vertex {}", pair[0])));
        }
        edges.push((pair[0], pair[1], line_no));
    }
    let n = edges.iter().map(|&(a, b, _)| a.max(b)).max().ok_or(InputError::Empty)?;
    let mut seen = std::collections::BTreeMap::new();
    for &(a, b, line) in &edges {
        if let Some(first) = seen.insert(Edge::new(a, b), line) {
            return Err(InputError::Line {
                line,
                message: format!("edge {} repeats line {first}", Edge::new(a, b)),
            });
        }
    }
    let graph = Graph::new(n, edges.iter().map(|&(a, b, _)| (a, b)))?;
    Ok(GraphInput {
        graph,
        tree: None,
        root: None,
    })
}
