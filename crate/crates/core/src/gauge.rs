//! Topological gauge potentials on the 1-skeleton of the two-particle
//! complex.
//!
//! Phases are affine expressions in one parameter per critical 1-cell,
//! understood modulo 2π. Heads of arrows carry phase zero, and the phase of
//! each tail is fixed by requiring zero flux through the square it is paired
//! with.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::config_complex::{Cell, TwoParticleComplex};
use crate::discrete_morse::{flow_order, GradientField};
use crate::graph_model::{Edge, UnionFind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaugeError {
    #[error("no order solves every tail edge (closed V-path)")]
    UnsolvableOrder,
    #[error("arrow heads on 1-cells do not form a spanning forest")]
    HeadsNotAForest,
    #[error("cycle is empty or does not close up at step {0}")]
    NotAClosedCycle(usize),
    #[error("{0} is not a 1-cell of the complex")]
    UnknownEdge(String),
}

/// `sum coefficients[i] * param_i`, with a constant term that is always zero
/// for the potentials built here.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PhaseExpr {
    coefficients: BTreeMap<usize, i64>,
}

impl PhaseExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn param(index: usize) -> Self {
        PhaseExpr {
            coefficients: BTreeMap::from([(index, 1)]),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficient(&self, index: usize) -> i64 {
        self.coefficients.get(&index).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coefficients.iter().map(|(i, k)| (*i, *k))
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = PhaseExpr::zero();
        out.add_scaled(self, k);
        out
    }

    fn add_scaled(&mut self, other: &PhaseExpr, k: i64) {
        for (&i, &c) in &other.coefficients {
            let e = self.coefficients.entry(i).or_insert(0);
            *e += k * c;
            if *e == 0 {
                self.coefficients.remove(&i);
            }
        }
    }

    /// Numeric value in `[0, 2π)` for the given parameter values.
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        let raw: f64 = self.terms().map(|(i, k)| k as f64 * values[i]).sum();
        raw.rem_euclid(std::f64::consts::TAU)
    }
}

impl Add for &PhaseExpr {
    type Output = PhaseExpr;

    fn add(self, rhs: &PhaseExpr) -> PhaseExpr {
        let mut out = self.clone();
        out.add_scaled(rhs, 1);
        out
    }
}

impl Sub for &PhaseExpr {
    type Output = PhaseExpr;

    fn sub(self, rhs: &PhaseExpr) -> PhaseExpr {
        let mut out = self.clone();
        out.add_scaled(rhs, -1);
        out
    }
}

impl Neg for &PhaseExpr {
    type Output = PhaseExpr;

    fn neg(self) -> PhaseExpr {
        self.scale(-1)
    }
}

pub fn param_name(index: usize) -> String {
    format!("phi{}", index + 1)
}

impl fmt::Display for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (i, k)) in self.terms().enumerate() {
            let name = param_name(i);
            match (n, k) {
                (0, 1) => write!(f, "{name}")?,
                (0, -1) => write!(f, "-{name}")?,
                (0, k) => write!(f, "{k}*{name}")?,
                (_, 1) => write!(f, " + {name}")?,
                (_, -1) => write!(f, " - {name}")?,
                (_, k) if k < 0 => write!(f, " - {}*{name}", -k)?,
                (_, k) => write!(f, " + {k}*{name}")?,
            }
        }
        Ok(())
    }
}

struct Params<'a>(&'a PhaseExpr);

impl Serialize for Params<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.coefficients.len()))?;
        for (i, k) in self.0.terms() {
            m.serialize_entry(&param_name(i), &k)?;
        }
        m.end()
    }
}

impl Serialize for PhaseExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("params", &Params(self))?;
        m.serialize_entry("const", &0)?;
        m.end()
    }
}

/// A 1-cell traversed forward (from `v x j` to `v x k` for `v x (j,k)`,
/// `j < k`) or backward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DirectedEdge {
    pub cell: Cell,
    pub forward: bool,
}

impl DirectedEdge {
    pub fn forward(cell: Cell) -> Self {
        DirectedEdge { cell, forward: true }
    }

    pub fn backward(cell: Cell) -> Self {
        DirectedEdge { cell, forward: false }
    }

    pub fn reversed(self) -> Self {
        DirectedEdge {
            cell: self.cell,
            forward: !self.forward,
        }
    }

    fn ends(&self) -> Option<(Cell, Cell)> {
        let Cell::Move { fixed, edge } = self.cell else { return None };
        let lo = Cell::point(fixed, edge.lo())?;
        let hi = Cell::point(fixed, edge.hi())?;
        Some(if self.forward { (lo, hi) } else { (hi, lo) })
    }

    pub fn source(&self) -> Option<Cell> {
        self.ends().map(|e| e.0)
    }

    pub fn target(&self) -> Option<Cell> {
        self.ends().map(|e| e.1)
    }

    /// The directed 1-cell that moves one particle from `from` to `to`, if the
    /// two points share exactly one vertex.
    pub fn hop(from: Cell, to: Cell) -> Option<DirectedEdge> {
        let (Cell::Point { a, b }, Cell::Point { a: c, b: d }) = (from, to) else {
            return None;
        };
        let (fixed, x, y) = if a == c && b != d {
            (a, b, d)
        } else if a == d && b != c {
            (a, b, c)
        } else if b == c && a != d {
            (b, a, d)
        } else if b == d && a != c {
            (b, a, c)
        } else {
            return None;
        };
        let edge = Edge::try_new(x, y)?;
        let cell = Cell::moving(fixed, edge)?;
        Some(DirectedEdge { cell, forward: x < y })
    }

    /// Closed walk following a sequence of points, returning to the first.
    pub fn walk(points: &[Cell]) -> Option<Vec<DirectedEdge>> {
        (0..points.len())
            .map(|i| DirectedEdge::hop(points[i], points[(i + 1) % points.len()]))
            .collect()
    }
}

impl fmt::Display for DirectedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ends() {
            Some((s, t)) => write!(f, "{}: {s} -> {t}", self.cell),
            None => write!(f, "{}", self.cell),
        }
    }
}

/// Boundary of a square as a closed walk whose flux equals the signed
/// boundary of the square.
pub fn square_boundary_cycle(square: &Cell) -> Option<Vec<DirectedEdge>> {
    let Cell::Square { first, second } = *square else { return None };
    let (a, b, c, d) = (first.lo(), first.hi(), second.lo(), second.hi());
    DirectedEdge::walk(&[
        Cell::point(a, c)?,
        Cell::point(b, c)?,
        Cell::point(b, d)?,
        Cell::point(a, d)?,
    ])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaugeParameter {
    pub name: String,
    pub cell: Cell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgePhase {
    pub edge: Cell,
    pub expr: PhaseExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub cell: Cell,
    pub expr: PhaseExpr,
}

/// Phases on forward-oriented 1-cells; reversing an edge negates its phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaugePotential {
    pub params: Vec<GaugeParameter>,
    pub assignment: Vec<EdgePhase>,
    /// Flux through each critical square; zero when the phases are
    /// independent.
    pub constraints: Vec<Constraint>,
    #[serde(skip)]
    phases: BTreeMap<Cell, PhaseExpr>,
}

impl GaugePotential {
    pub fn phase(&self, edge: &DirectedEdge) -> Option<PhaseExpr> {
        let p = self.phases.get(&edge.cell)?;
        Some(if edge.forward { p.clone() } else { -p })
    }

    pub fn param_of(&self, cell: &Cell) -> Option<usize> {
        self.params.iter().position(|p| p.cell == *cell)
    }

    /// Constraints that are not identically zero.
    pub fn nontrivial_constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| !c.expr.is_zero())
    }
}

fn signed_flux(
    phases: &BTreeMap<Cell, PhaseExpr>,
    terms: &[(Cell, i64)],
    skip: Option<&Cell>,
) -> Option<PhaseExpr> {
    let mut total = PhaseExpr::zero();
    for (cell, k) in terms {
        if Some(cell) != skip {
            total.add_scaled(phases.get(cell)?, *k);
        }
    }
    Some(total)
}

pub fn build_gauge(complex: &TwoParticleComplex, field: &GradientField<Cell>) -> Result<GaugePotential, GaugeError> {
    check_heads(complex, field)?;
    let mut phases: BTreeMap<Cell, PhaseExpr> = BTreeMap::new();
    let mut params = Vec::new();
    for cell in complex.cells(1) {
        if field.is_head(cell) {
            phases.insert(*cell, PhaseExpr::zero());
        } else if field.is_critical(cell) {
            phases.insert(*cell, PhaseExpr::param(params.len()));
            params.push(GaugeParameter {
                name: param_name(params.len()),
                cell: *cell,
            });
        }
    }

    // A tail depends on the other faces of its square; those that are tails
    // come later in flow order, so solve from the back.
    let order = flow_order(complex, field, 1).ok_or(GaugeError::UnsolvableOrder)?;
    for tail in order.iter().rev() {
        let square = field.head_of(tail).unwrap();
        let terms = complex.boundary(square);
        let rest = signed_flux(&phases, terms, Some(tail)).ok_or(GaugeError::UnsolvableOrder)?;
        let s = complex.incidence(square, tail);
        phases.insert(*tail, rest.scale(-s));
    }

    let mut constraints = Vec::new();
    for sq in complex.cells(2) {
        if field.is_critical(sq) {
            let expr = signed_flux(&phases, complex.boundary(sq), None).ok_or(GaugeError::UnsolvableOrder)?;
            constraints.push(Constraint { cell: *sq, expr });
        }
    }

    Ok(GaugePotential {
        params,
        assignment: complex
            .cells(1)
            .iter()
            .map(|c| EdgePhase {
                edge: *c,
                expr: phases[c].clone(),
            })
            .collect(),
        constraints,
        phases,
    })
}

/// Head 1-cells, viewed as edges between their two 0-cell faces, must form a
/// forest with one tree per critical 0-cell.
fn check_heads(complex: &TwoParticleComplex, field: &GradientField<Cell>) -> Result<(), GaugeError> {
    let points = complex.cells(0);
    let mut uf = UnionFind::new(points.len());
    let mut heads = 0;
    for cell in complex.cells(1) {
        if !field.is_head(cell) {
            continue;
        }
        heads += 1;
        let ends: Vec<usize> = complex
            .boundary(cell)
            .iter()
            .map(|(p, _)| complex.index_of(p).unwrap())
            .collect();
        if !uf.union(ends[0], ends[1]) {
            return Err(GaugeError::HeadsNotAForest);
        }
    }
    if heads + field.critical_in_dim(0).len() != points.len() {
        return Err(GaugeError::HeadsNotAForest);
    }
    Ok(())
}

/// Total phase around a closed walk.
pub fn flux(potential: &GaugePotential, cycle: &[DirectedEdge]) -> Result<PhaseExpr, GaugeError> {
    if cycle.is_empty() {
        return Err(GaugeError::NotAClosedCycle(0));
    }
    let mut total = PhaseExpr::zero();
    for (i, step) in cycle.iter().enumerate() {
        let next = &cycle[(i + 1) % cycle.len()];
        let p = potential
            .phase(step)
            .ok_or_else(|| GaugeError::UnknownEdge(step.cell.to_string()))?;
        if step.target().is_none() || step.target() != next.source() {
            return Err(GaugeError::NotAClosedCycle(i));
        }
        total.add_scaled(&p, 1);
    }
    Ok(total)
}
