//! The discrete two-particle configuration space of a graph.
//!
//! Cells are products of closed graph cells whose closures are disjoint,
//! taken modulo swapping the particles:
//!
//! - 0-cells `(u,v)`: two distinct vertices.
//! - 1-cells `v x (j,k)`: one particle resting at `v`, the other on an edge
//!   not touching `v`.
//! - 2-cells `(a,b) x (c,d)`: two disjoint edges.
//!
//! Orientation: `v x (j,k)` with `j < k` runs from `(v,j)` to `(v,k)`. A square
//! with canonical factors `(a,b)`, `(c,d)` has boundary
//! `b x (c,d) - a x (c,d) - d x (a,b) + c x (a,b)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::complex::{CellLike, RegularComplex};
use crate::graph_model::{Edge, Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("two-particle space needs at least 2 vertices, graph has {0}")]
    TooSmall(usize),
}

/// A cell of the two-particle complex in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    /// Both particles on vertices, `a < b`.
    Point { a: Vertex, b: Vertex },
    /// One particle at `fixed`, the other moving along `edge`.
    Move { fixed: Vertex, edge: Edge },
    /// Both particles moving; `first` holds the smallest of the four vertices.
    Square { first: Edge, second: Edge },
}

impl Cell {
    pub fn point(u: Vertex, v: Vertex) -> Option<Cell> {
        Edge::try_new(u, v).map(|e| Cell::Point { a: e.lo(), b: e.hi() })
    }

    pub fn moving(fixed: Vertex, edge: Edge) -> Option<Cell> {
        (!edge.contains(fixed)).then_some(Cell::Move { fixed, edge })
    }

    pub fn square(e1: Edge, e2: Edge) -> Option<Cell> {
        if e1.meets(&e2) {
            return None;
        }
        let (first, second) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        Some(Cell::Square { first, second })
    }

    /// Vertices occupied by the closure of the cell, without repetition.
    pub fn vertices(&self) -> Vec<Vertex> {
        match *self {
            Cell::Point { a, b } => vec![a, b],
            Cell::Move { fixed, edge } => vec![fixed, edge.lo(), edge.hi()],
            Cell::Square { first, second } => vec![first.lo(), first.hi(), second.lo(), second.hi()],
        }
    }

    fn boundary(&self) -> Vec<(Cell, i64)> {
        match *self {
            Cell::Point { .. } => vec![],
            Cell::Move { fixed, edge } => vec![
                (Cell::point(fixed, edge.hi()).unwrap(), 1),
                (Cell::point(fixed, edge.lo()).unwrap(), -1),
            ],
            Cell::Square { first, second } => {
                let (a, b) = (first.lo(), first.hi());
                let (c, d) = (second.lo(), second.hi());
                vec![
                    (Cell::Move { fixed: b, edge: second }, 1),
                    (Cell::Move { fixed: a, edge: second }, -1),
                    (Cell::Move { fixed: d, edge: first }, -1),
                    (Cell::Move { fixed: c, edge: first }, 1),
                ]
            }
        }
    }
}

impl CellLike for Cell {
    fn dim(&self) -> usize {
        match self {
            Cell::Point { .. } => 0,
            Cell::Move { .. } => 1,
            Cell::Square { .. } => 2,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Point { a, b } => write!(f, "({a},{b})"),
            Cell::Move { fixed, edge } => write!(f, "{fixed}x{edge}"),
            Cell::Square { first, second } => write!(f, "{first}x{second}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse cell {0:?}")]
pub struct ParseCellError(String);

/// Accepts `(1,2)`, `3x(2,4)`, `(1,3)x(4,5)` in any factor order; `×` is
/// accepted for `x`.
impl FromStr for Cell {
    type Err = ParseCellError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseCellError(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let compact = compact.replace('×', "x");
        let parse_pair = |t: &str| -> Option<(Vertex, Vertex)> {
            let inner = t.strip_prefix('(')?.strip_suffix(')')?;
            let (x, y) = inner.split_once(',')?;
            Some((x.parse().ok()?, y.parse().ok()?))
        };
        let edge = |t: &str| parse_pair(t).and_then(|(x, y)| Edge::try_new(x, y));
        match compact.split_once('x') {
            None => parse_pair(&compact).and_then(|(x, y)| Cell::point(x, y)).ok_or_else(err),
            Some((l, r)) => {
                if let Ok(v) = l.parse::<Vertex>() {
                    edge(r).and_then(|e| Cell::moving(v, e)).ok_or_else(err)
                } else if let Ok(v) = r.parse::<Vertex>() {
                    edge(l).and_then(|e| Cell::moving(v, e)).ok_or_else(err)
                } else {
                    edge(l)
                        .zip(edge(r))
                        .and_then(|(e1, e2)| Cell::square(e1, e2))
                        .ok_or_else(err)
                }
            }
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub type TwoParticleComplex = RegularComplex<Cell>;

/// Builds the two-particle complex with the orientation described in the
/// module docs. Cells are listed in sorted canonical order.
pub fn build_d2(graph: &Graph) -> Result<TwoParticleComplex, ComplexError> {
    let n = graph.vertex_count();
    if n < 2 {
        return Err(ComplexError::TooSmall(n));
    }
    let mut edges: Vec<Edge> = graph.edges().to_vec();
    edges.sort();

    let mut cells0 = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            cells0.push(Cell::Point { a, b });
        }
    }
    let mut cells1 = Vec::new();
    for v in 1..=n {
        for &e in &edges {
            if let Some(c) = Cell::moving(v, e) {
                cells1.push(c);
            }
        }
    }
    let mut cells2 = Vec::new();
    for (i, &e1) in edges.iter().enumerate() {
        for &e2 in &edges[i + 1..] {
            if let Some(c) = Cell::square(e1, e2) {
                cells2.push(c);
            }
        }
    }
    cells2.sort();
    Ok(RegularComplex::new(vec![cells0, cells1, cells2], Cell::boundary))
}

pub fn euler_characteristic(complex: &TwoParticleComplex) -> i64 {
    complex.euler_characteristic()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AbramsWitness {
    /// A path between distinct vertices of valence other than 2 that is too short.
    ShortPath { vertices: Vec<Vertex> },
    /// A cycle that is too short, listed from its smallest vertex.
    ShortCycle { vertices: Vec<Vertex> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbramsReport {
    pub n: usize,
    pub condition1: bool,
    pub condition2: bool,
    pub witnesses: Vec<AbramsWitness>,
}

/// Checks whether the `n`-particle discrete configuration space of the graph
/// is a deformation retract of the topological one: every path joining two
/// distinct essential vertices (valence not 2) needs at least `n - 1` edges,
/// and every cycle at least `n + 1` edges.
///
/// All simple paths are enumerated, so every violating path is reported, not
/// only the shortest one.
pub fn check_abrams(graph: &Graph, n: usize) -> AbramsReport {
    let essential: BTreeSet<Vertex> = graph.vertices().filter(|&v| graph.degree(v) != 2).collect();
    let mut witnesses = Vec::new();

    // Paths with fewer than n - 1 edges.
    let max_path = n.saturating_sub(2);
    for &start in &essential {
        let mut path = vec![start];
        short_paths(graph, &essential, max_path, &mut path, &mut witnesses);
    }
    let condition1 = witnesses.is_empty();
    let path_witnesses = witnesses.len();

    // Cycles with at most n edges.
    for start in graph.vertices() {
        let mut path = vec![start];
        short_cycles(graph, n, &mut path, &mut witnesses);
    }
    let condition2 = witnesses.len() == path_witnesses;

    AbramsReport {
        n,
        condition1,
        condition2,
        witnesses,
    }
}

fn short_paths(
    graph: &Graph,
    essential: &BTreeSet<Vertex>,
    max_edges: usize,
    path: &mut Vec<Vertex>,
    out: &mut Vec<AbramsWitness>,
) {
    let last = *path.last().unwrap();
    if path.len() > 1 && essential.contains(&last) && path[0] < last {
        out.push(AbramsWitness::ShortPath { vertices: path.clone() });
    }
    if path.len() > max_edges {
        return;
    }
    for &w in graph.neighbors(last) {
        if !path.contains(&w) {
            path.push(w);
            short_paths(graph, essential, max_edges, path, out);
            path.pop();
        }
    }
}

fn short_cycles(graph: &Graph, max_edges: usize, path: &mut Vec<Vertex>, out: &mut Vec<AbramsWitness>) {
    let start = path[0];
    let last = *path.last().unwrap();
    for &w in graph.neighbors(last) {
        if w == start && path.len() >= 3 && path[1] < last {
            out.push(AbramsWitness::ShortCycle { vertices: path.clone() });
        } else if w > start && !path.contains(&w) && path.len() < max_edges {
            path.push(w);
            short_cycles(graph, max_edges, path, out);
            path.pop();
        }
    }
}
