//! One-particle layer: the input graph, its rooted spanning tree with
//! depth-first preorder labels, and the perfect Morse function on the graph.
//!
//! Vertices are 1-based throughout. After [`relabel_by_tree`] the root carries
//! label 1 and every other vertex has a larger label than its tree parent,
//! which is the only ordering property the two-particle construction relies on.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{CellLike, RegularComplex};
use crate::discrete_morse::CellFunction;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range 1..={vertex_count}")]
    VertexOutOfRange { vertex: Vertex, vertex_count: usize },
    #[error("loop at vertex {0}")]
    Loop(Vertex),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("graph is disconnected: vertex {0} is unreachable from vertex 1")]
    Disconnected(Vertex),
    #[error("adjacency order for vertex {0} is not a permutation of its neighbours")]
    BadAdjacencyOrder(Vertex),
    #[error("requested tree is not a spanning tree: {0}")]
    NotATree(String),
    #[error("root {root} has tree valency {valency}, expected 1")]
    BadRoot { root: Vertex, valency: usize },
}

/// Undirected edge with endpoints stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[Vertex; 2]", try_from = "[Vertex; 2]")]
pub struct Edge {
    lo: Vertex,
    hi: Vertex,
}

impl Edge {
    /// Panics on a loop; use [`Edge::try_new`] for untrusted input.
    pub fn new(a: Vertex, b: Vertex) -> Self {
        Self::try_new(a, b).unwrap_or_else(|| panic!("loop edge ({a},{b})"))
    }

    pub fn try_new(a: Vertex, b: Vertex) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Edge { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(&self) -> Vertex {
        self.lo
    }

    pub fn hi(&self) -> Vertex {
        self.hi
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.lo == v || self.hi == v
    }

    pub fn meets(&self, other: &Edge) -> bool {
        self.contains(other.lo) || self.contains(other.hi)
    }

    /// The endpoint that is not `v`.
    pub fn other(&self, v: Vertex) -> Option<Vertex> {
        if v == self.lo {
            Some(self.hi)
        } else if v == self.hi {
            Some(self.lo)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

impl From<Edge> for [Vertex; 2] {
    fn from(e: Edge) -> Self {
        [e.lo, e.hi]
    }
}

impl TryFrom<[Vertex; 2]> for Edge {
    type Error = String;

    fn try_from(value: [Vertex; 2]) -> Result<Self, Self::Error> {
        Edge::try_new(value[0], value[1]).ok_or_else(|| format!("loop edge {value:?}"))
    }
}

/// Simple connected graph on vertices `1..=vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph; neighbour order follows edge input order.
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let check = |v: Vertex| {
            if v == 0 || v > vertex_count {
                Err(GraphError::VertexOutOfRange {
                    vertex: v,
                    vertex_count,
                })
            } else {
                Ok(v)
            }
        };
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (a, b) in edges {
            let (a, b) = (check(a)?, check(b)?);
            let edge = Edge::try_new(a, b).ok_or(GraphError::Loop(a))?;
            if !seen.insert(edge) {
                return Err(GraphError::DuplicateEdge(edge));
            }
            list.push(edge);
            adjacency[a - 1].push(b);
            adjacency[b - 1].push(a);
        }
        let graph = Graph {
            vertex_count,
            edges: list,
            adjacency,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    /// Replaces the neighbour order used for traversal. `order[v - 1]` must be
    /// a permutation of the neighbours of `v`.
    pub fn with_adjacency_order(mut self, order: Vec<Vec<Vertex>>) -> Result<Self, GraphError> {
        if order.len() != self.vertex_count {
            return Err(GraphError::BadAdjacencyOrder(order.len().min(self.vertex_count) + 1));
        }
        for (i, list) in order.iter().enumerate() {
            let mut given = list.clone();
            let mut actual = self.adjacency[i].clone();
            given.sort_unstable();
            actual.sort_unstable();
            if given != actual {
                return Err(GraphError::BadAdjacencyOrder(i + 1));
            }
        }
        self.adjacency = order;
        Ok(self)
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![1];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v - 1] {
                if !seen[w - 1] {
                    seen[w - 1] = true;
                    stack.push(w);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(GraphError::Disconnected(i + 1)),
            None => Ok(()),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.vertex_count
    }

    /// Edges in input order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v - 1]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v - 1].len()
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a != b && a >= 1 && a <= self.vertex_count && self.adjacency[a - 1].contains(&b)
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedSpanningTree {
    root: Vertex,
    parent: Vec<Option<Vertex>>,
    tree_edges: BTreeSet<Edge>,
}

impl RootedSpanningTree {
    pub fn root(&self) -> Vertex {
        self.root
    }

    /// Terminal vertex of the parent edge; `None` for the root.
    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v - 1]
    }

    /// The tree edge joining `v` to its parent.
    pub fn parent_edge(&self, v: Vertex) -> Option<Edge> {
        self.parent(v).map(|p| Edge::new(v, p))
    }

    pub fn tree_edges(&self) -> &BTreeSet<Edge> {
        &self.tree_edges
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.tree_edges.contains(e)
    }

    /// Vertex whose parent edge is `e`, if `e` is a tree edge.
    pub fn child_of(&self, e: &Edge) -> Option<Vertex> {
        if self.parent(e.hi) == Some(e.lo) {
            Some(e.hi)
        } else if self.parent(e.lo) == Some(e.hi) {
            Some(e.lo)
        } else {
            None
        }
    }

    pub fn valency(&self, v: Vertex) -> usize {
        self.tree_edges.iter().filter(|e| e.contains(v)).count()
    }
}

/// Builds the rooted spanning tree. Without `requested_tree` the depth-first
/// tree from vertex 1 (in adjacency order) is used; without `requested_root`
/// the lowest-labelled leaf of the tree becomes the root.
pub fn build_spanning_tree(
    graph: &Graph,
    requested_tree: Option<&[Edge]>,
    requested_root: Option<Vertex>,
) -> Result<RootedSpanningTree, GraphError> {
    let tree_edges: BTreeSet<Edge> = match requested_tree {
        Some(edges) => validate_tree(graph, edges)?,
        None => dfs_tree(graph),
    };
    let valency = |v: Vertex| tree_edges.iter().filter(|e| e.contains(v)).count();
    let root = match requested_root {
        Some(r) => {
            if r == 0 || r > graph.vertex_count() {
                return Err(GraphError::VertexOutOfRange {
                    vertex: r,
                    vertex_count: graph.vertex_count(),
                });
            }
            // A single vertex has no leaf; accept it as its own root.
            if graph.vertex_count() > 1 && valency(r) != 1 {
                return Err(GraphError::BadRoot {
                    root: r,
                    valency: valency(r),
                });
            }
            r
        }
        None => graph
            .vertices()
            .find(|&v| valency(v) == 1)
            .unwrap_or(1),
    };

    let mut parent = vec![None; graph.vertex_count()];
    let mut seen = vec![false; graph.vertex_count()];
    seen[root - 1] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &w in graph.neighbors(v) {
            if !seen[w - 1] && tree_edges.contains(&Edge::new(v, w)) {
                seen[w - 1] = true;
                parent[w - 1] = Some(v);
                stack.push(w);
            }
        }
    }
    Ok(RootedSpanningTree {
        root,
        parent,
        tree_edges,
    })
}

fn validate_tree(graph: &Graph, edges: &[Edge]) -> Result<BTreeSet<Edge>, GraphError> {
    let n = graph.vertex_count();
    let set: BTreeSet<Edge> = edges.iter().copied().collect();
    if set.len() != edges.len() {
        return Err(GraphError::NotATree("repeated edge".into()));
    }
    if let Some(e) = set.iter().find(|e| !graph.has_edge(e.lo, e.hi)) {
        return Err(GraphError::NotATree(format!("{e} is not an edge of the graph")));
    }
    if set.len() + 1 != n {
        return Err(GraphError::NotATree(format!(
            "{} edges given, a spanning tree needs {}",
            set.len(),
            n - 1
        )));
    }
    let mut uf = UnionFind::new(n);
    for e in &set {
        if !uf.union(e.lo - 1, e.hi - 1) {
            return Err(GraphError::NotATree(format!("{e} closes a cycle")));
        }
    }
    Ok(set)
}

fn dfs_tree(graph: &Graph) -> BTreeSet<Edge> {
    fn visit(graph: &Graph, v: Vertex, seen: &mut [bool], out: &mut BTreeSet<Edge>) {
        seen[v - 1] = true;
        for &w in graph.neighbors(v) {
            if !seen[w - 1] {
                out.insert(Edge::new(v, w));
                visit(graph, w, seen, out);
            }
        }
    }
    let mut seen = vec![false; graph.vertex_count()];
    let mut out = BTreeSet::new();
    visit(graph, 1, &mut seen, &mut out);
    out
}

/// Vertex permutation produced by [`relabel_by_tree`]; `new_label[old - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relabeling {
    new_label: Vec<Vertex>,
}

impl Relabeling {
    pub fn identity(n: usize) -> Self {
        Relabeling {
            new_label: (1..=n).collect(),
        }
    }

    pub fn apply(&self, old: Vertex) -> Vertex {
        self.new_label[old - 1]
    }

    pub fn invert(&self, new: Vertex) -> Vertex {
        self.new_label.iter().position(|&l| l == new).unwrap() + 1
    }

    pub fn is_identity(&self) -> bool {
        self.new_label.iter().enumerate().all(|(i, &l)| l == i + 1)
    }

    /// `(old, new)` pairs in old-label order.
    pub fn pairs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.new_label.iter().enumerate().map(|(i, &l)| (i + 1, l))
    }
}

/// Relabels vertices by depth-first preorder of the tree from its root,
/// visiting children in adjacency order. The root becomes vertex 1.
pub fn relabel_by_tree(
    graph: &Graph,
    tree: &RootedSpanningTree,
) -> (Graph, RootedSpanningTree, Relabeling) {
    let n = graph.vertex_count();
    let mut new_label = vec![0; n];
    let mut next = 1;
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        new_label[v - 1] = next;
        next += 1;
        let children: Vec<Vertex> = graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| tree.parent(w) == Some(v))
            .collect();
        stack.extend(children.into_iter().rev());
    }
    let map = Relabeling { new_label };

    let mut adjacency = vec![Vec::new(); n];
    for v in graph.vertices() {
        adjacency[map.apply(v) - 1] = graph.neighbors(v).iter().map(|&w| map.apply(w)).collect();
    }
    let relabeled = Graph {
        vertex_count: n,
        edges: graph
            .edges()
            .iter()
            .map(|e| Edge::new(map.apply(e.lo), map.apply(e.hi)))
            .collect(),
        adjacency,
    };
    let mut parent = vec![None; n];
    for v in graph.vertices() {
        parent[map.apply(v) - 1] = tree.parent(v).map(|p| map.apply(p));
    }
    let new_tree = RootedSpanningTree {
        root: map.apply(tree.root()),
        parent,
        tree_edges: tree
            .tree_edges()
            .iter()
            .map(|e| Edge::new(map.apply(e.lo), map.apply(e.hi)))
            .collect(),
    };
    (relabeled, new_tree, map)
}

/// Perfect discrete Morse function on the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneParticleMorse {
    vertex_value: Vec<i64>,
    edge_value: BTreeMap<Edge, i64>,
    deleted_edges: Vec<Edge>,
}

impl OneParticleMorse {
    pub fn vertex(&self, v: Vertex) -> i64 {
        self.vertex_value[v - 1]
    }

    pub fn edge(&self, e: &Edge) -> i64 {
        self.edge_value[e]
    }

    /// Edges outside the spanning tree, in graph input order.
    pub fn deleted_edges(&self) -> &[Edge] {
        &self.deleted_edges
    }

    pub fn is_deleted(&self, e: &Edge) -> bool {
        self.deleted_edges.contains(e)
    }

    pub fn edge_values(&self) -> &BTreeMap<Edge, i64> {
        &self.edge_value
    }

    /// The same values as a function on the graph viewed as a 1-complex.
    pub fn as_cell_function(&self) -> CellFunction<GraphCell> {
        let mut f = CellFunction::new();
        for (i, &value) in self.vertex_value.iter().enumerate() {
            f.set(GraphCell::Vertex(i + 1), value);
        }
        for (e, &value) in &self.edge_value {
            f.set(GraphCell::Edge(*e), value);
        }
        f
    }
}

/// `f1(k) = 2k - 2`; tree edges take the larger endpoint value and deleted
/// edges take it plus two.
///
/// Panics unless the graph is labelled by [`relabel_by_tree`] (root 1, parents
/// carry smaller labels).
pub fn build_f1(graph: &Graph, tree: &RootedSpanningTree) -> OneParticleMorse {
    assert_eq!(tree.root(), 1, "graph must be relabelled so the root is vertex 1");
    for v in graph.vertices() {
        if let Some(p) = tree.parent(v) {
            assert!(p < v, "parent {p} of {v} must carry a smaller label");
        }
    }
    let vertex_value: Vec<i64> = graph.vertices().map(|k| 2 * k as i64 - 2).collect();
    let mut edge_value = BTreeMap::new();
    let mut deleted_edges = Vec::new();
    for e in graph.edges() {
        let top = vertex_value[e.lo - 1].max(vertex_value[e.hi - 1]);
        if tree.contains(e) {
            edge_value.insert(*e, top);
        } else {
            edge_value.insert(*e, top + 2);
            deleted_edges.push(*e);
        }
    }
    OneParticleMorse {
        vertex_value,
        edge_value,
        deleted_edges,
    }
}

/// A cell of the graph seen as a 1-dimensional complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphCell {
    Vertex(Vertex),
    Edge(Edge),
}

impl fmt::Display for GraphCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphCell::Vertex(v) => write!(f, "{v}"),
            GraphCell::Edge(e) => write!(f, "{e}"),
        }
    }
}

impl CellLike for GraphCell {
    fn dim(&self) -> usize {
        match self {
            GraphCell::Vertex(_) => 0,
            GraphCell::Edge(_) => 1,
        }
    }
}

/// The graph as a 1-complex; edge `(j,k)` has boundary `k - j`.
pub fn graph_complex(graph: &Graph) -> RegularComplex<GraphCell> {
    let mut edges: Vec<Edge> = graph.edges().to_vec();
    edges.sort();
    RegularComplex::new(
        vec![
            graph.vertices().map(GraphCell::Vertex).collect(),
            edges.into_iter().map(GraphCell::Edge).collect(),
        ],
        |cell| match cell {
            GraphCell::Vertex(_) => vec![],
            GraphCell::Edge(e) => vec![(GraphCell::Vertex(e.hi), 1), (GraphCell::Vertex(e.lo), -1)],
        },
    )
}

/// Minimal disjoint-set forest over `0..n`.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
