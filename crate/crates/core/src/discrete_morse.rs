//! Discrete Morse functions on cell complexes, their gradient vector fields,
//! and V-paths.
//!
//! Values are integers and every comparison is exact. An arrow runs from a
//! lower cell (the tail) to an upper cell (the head) whenever the upper cell
//! does not exceed the lower one.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::complex::{CellLike, RegularComplex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorseError {
    #[error("function has no value on cell {0}")]
    MissingValue(String),
    #[error("function is not a discrete Morse function ({} violating cells, first at {})", .0.len(), .0[0])]
    NotMorse(Vec<String>),
    #[error("gradient field has a closed V-path")]
    CyclicField,
    #[error("cell {0} appears in more than one pair")]
    DoublePaired(String),
    #[error("pair ({0}, {1}) is not a face/coface pair")]
    NotAFace(String, String),
}

/// Integer-valued function on cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellFunction<C: CellLike> {
    values: BTreeMap<C, i64>,
}

impl<C: CellLike> Default for CellFunction<C> {
    fn default() -> Self {
        CellFunction {
            values: BTreeMap::new(),
        }
    }
}

impl<C: CellLike> CellFunction<C> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Evaluates `f` on every cell of the complex.
    pub fn from_fn(complex: &RegularComplex<C>, f: impl Fn(&C) -> i64) -> Self {
        CellFunction {
            values: complex.all_cells().map(|c| (c.clone(), f(c))).collect(),
        }
    }

    pub fn get(&self, cell: &C) -> Option<i64> {
        self.values.get(cell).copied()
    }

    /// Panics when the cell has no value.
    pub fn value(&self, cell: &C) -> i64 {
        self.values[cell]
    }

    pub fn set(&mut self, cell: C, value: i64) {
        self.values.insert(cell, value);
    }

    pub fn add(&mut self, cell: &C, amount: i64) {
        *self
            .values
            .get_mut(cell)
            .unwrap_or_else(|| panic!("no value on {cell}")) += amount;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&C, i64)> {
        self.values.iter().map(|(c, v)| (c, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn require_total(&self, complex: &RegularComplex<C>) -> Result<(), MorseError> {
        match complex.all_cells().find(|c| !self.values.contains_key(c)) {
            Some(c) => Err(MorseError::MissingValue(c.to_string())),
            None => Ok(()),
        }
    }
}

/// A cell with too many "wrong-way" neighbours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseViolation<C> {
    pub cell: C,
    /// Cofaces with value at most the cell's value.
    pub higher: Vec<C>,
    /// Faces with value at least the cell's value.
    pub lower: Vec<C>,
}

fn wrong_way<C: CellLike>(complex: &RegularComplex<C>, f: &CellFunction<C>, cell: &C) -> (Vec<C>, Vec<C>) {
    let v = f.value(cell);
    let higher = complex
        .coboundary(cell)
        .iter()
        .filter(|(b, _)| f.value(b) <= v)
        .map(|(b, _)| b.clone())
        .collect();
    let lower = complex
        .boundary(cell)
        .iter()
        .filter(|(b, _)| f.value(b) >= v)
        .map(|(b, _)| b.clone())
        .collect();
    (higher, lower)
}

/// Lists every cell where more than one coface is not higher or more than one
/// face is not lower. An empty list means `f` is a discrete Morse function.
pub fn check_morse<C: CellLike>(
    complex: &RegularComplex<C>,
    f: &CellFunction<C>,
) -> Result<Vec<MorseViolation<C>>, MorseError> {
    f.require_total(complex)?;
    Ok(complex
        .all_cells()
        .filter_map(|cell| {
            let (higher, lower) = wrong_way(complex, f, cell);
            (higher.len() > 1 || lower.len() > 1).then(|| MorseViolation {
                cell: cell.clone(),
                higher,
                lower,
            })
        })
        .collect())
}

/// Pairing of noncritical cells. Each cell is a tail, a head, or critical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientField<C: CellLike> {
    head_of: BTreeMap<C, C>,
    tail_of: BTreeMap<C, C>,
    critical: BTreeSet<C>,
}

impl<C: CellLike> GradientField<C> {
    /// Builds a field from explicit `(tail, head)` pairs; cells not mentioned
    /// are critical. Acyclicity is not checked here.
    pub fn from_pairs(
        complex: &RegularComplex<C>,
        pairs: impl IntoIterator<Item = (C, C)>,
    ) -> Result<Self, MorseError> {
        let mut head_of = BTreeMap::new();
        let mut tail_of = BTreeMap::new();
        let mut used = BTreeSet::new();
        for (tail, head) in pairs {
            if complex.incidence(&head, &tail) == 0 || head.dim() != tail.dim() + 1 {
                return Err(MorseError::NotAFace(tail.to_string(), head.to_string()));
            }
            for c in [&tail, &head] {
                if !used.insert(c.clone()) {
                    return Err(MorseError::DoublePaired(c.to_string()));
                }
            }
            tail_of.insert(head.clone(), tail.clone());
            head_of.insert(tail, head);
        }
        let critical = complex.all_cells().filter(|c| !used.contains(*c)).cloned().collect();
        Ok(GradientField {
            head_of,
            tail_of,
            critical,
        })
    }

    pub fn head_of(&self, tail: &C) -> Option<&C> {
        self.head_of.get(tail)
    }

    pub fn tail_of(&self, head: &C) -> Option<&C> {
        self.tail_of.get(head)
    }

    pub fn is_critical(&self, cell: &C) -> bool {
        self.critical.contains(cell)
    }

    pub fn is_tail(&self, cell: &C) -> bool {
        self.head_of.contains_key(cell)
    }

    pub fn is_head(&self, cell: &C) -> bool {
        self.tail_of.contains_key(cell)
    }

    pub fn critical(&self) -> &BTreeSet<C> {
        &self.critical
    }

    pub fn critical_in_dim(&self, dim: usize) -> Vec<C> {
        self.critical.iter().filter(|c| c.dim() == dim).cloned().collect()
    }

    /// `(tail, head)` pairs in tail order.
    pub fn pairs(&self) -> impl Iterator<Item = (&C, &C)> {
        self.head_of.iter()
    }

    pub fn pair_count(&self) -> usize {
        self.head_of.len()
    }
}

/// Gradient field of a discrete Morse function: `(a, b)` is paired when `b`
/// is a coface of `a` with `f(b) <= f(a)`.
pub fn build_gradient_field<C: CellLike>(
    complex: &RegularComplex<C>,
    f: &CellFunction<C>,
) -> Result<GradientField<C>, MorseError> {
    let violations = check_morse(complex, f)?;
    if !violations.is_empty() {
        return Err(MorseError::NotMorse(
            violations.iter().map(|v| v.cell.to_string()).collect(),
        ));
    }
    let mut pairs = Vec::new();
    for cell in complex.all_cells() {
        let v = f.value(cell);
        for (up, _) in complex.coboundary(cell) {
            if f.value(up) <= v {
                pairs.push((cell.clone(), up.clone()));
            }
        }
    }
    let field = GradientField::from_pairs(complex, pairs)?;
    if !check_acyclic(complex, &field) {
        return Err(MorseError::CyclicField);
    }
    Ok(field)
}

/// Successors of a tail in the flow graph: the other faces of its head that
/// are themselves tails.
fn tail_successors<'a, C: CellLike>(
    complex: &'a RegularComplex<C>,
    field: &'a GradientField<C>,
    tail: &'a C,
) -> impl Iterator<Item = &'a C> + 'a {
    let head = field.head_of(tail).expect("tail has a head");
    complex
        .boundary(head)
        .iter()
        .map(|(c, _)| c)
        .filter(move |c| *c != tail && field.is_tail(c))
}

/// Tails of the given dimension ordered so that every tail precedes the
/// tails reachable from it along V-paths. `None` if a closed V-path exists.
pub fn flow_order<C: CellLike>(
    complex: &RegularComplex<C>,
    field: &GradientField<C>,
    dim: usize,
) -> Option<Vec<C>> {
    let tails: Vec<&C> = field.head_of.keys().filter(|c| c.dim() == dim).collect();
    let mut indegree: HashMap<&C, usize> = tails.iter().map(|&t| (t, 0)).collect();
    for &t in &tails {
        for s in tail_successors(complex, field, t) {
            *indegree.get_mut(s).unwrap() += 1;
        }
    }
    let mut ready: Vec<&C> = tails.iter().copied().filter(|t| indegree[t] == 0).collect();
    ready.reverse();
    let mut order = Vec::with_capacity(tails.len());
    while let Some(t) = ready.pop() {
        order.push(t.clone());
        for s in tail_successors(complex, field, t) {
            let d = indegree.get_mut(s).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(s);
            }
        }
    }
    (order.len() == tails.len()).then_some(order)
}

/// True iff no V-path returns to its starting cell.
pub fn check_acyclic<C: CellLike>(complex: &RegularComplex<C>, field: &GradientField<C>) -> bool {
    (0..complex.top_dim()).all(|d| flow_order(complex, field, d).is_some())
}

/// Alternating sequence `a0, b0, a1, b1, ..., ak` with `(ai, bi)` paired and
/// `a(i+1)` a face of `bi` other than `ai`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VPath<C> {
    pub cells: Vec<C>,
    /// Product over steps of `-<d bi, ai> <d bi, a(i+1)>`.
    pub multiplicity: i64,
}

impl<C> VPath<C> {
    pub fn start(&self) -> &C {
        &self.cells[0]
    }

    pub fn end(&self) -> &C {
        self.cells.last().unwrap()
    }

    /// Number of paired steps.
    pub fn steps(&self) -> usize {
        self.cells.len() / 2
    }
}

/// Which maximal V-paths to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathEnd {
    /// Only paths that stop at a critical cell.
    Critical,
    /// Every maximal path, including those that stop at a head.
    Any,
}

/// All maximal V-paths starting at the given cells, found depth-first.
/// Finite because the field is acyclic.
pub fn enumerate_vpaths<C: CellLike>(
    complex: &RegularComplex<C>,
    field: &GradientField<C>,
    from: &[C],
    end: PathEnd,
) -> Vec<VPath<C>> {
    fn walk<C: CellLike>(
        complex: &RegularComplex<C>,
        field: &GradientField<C>,
        path: &mut Vec<C>,
        sign: i64,
        end: PathEnd,
        out: &mut Vec<VPath<C>>,
    ) {
        let current = path.last().unwrap().clone();
        let Some(head) = field.head_of(&current) else {
            if end == PathEnd::Any || field.is_critical(&current) {
                out.push(VPath {
                    cells: path.clone(),
                    multiplicity: sign,
                });
            }
            return;
        };
        let head = head.clone();
        let into = complex.incidence(&head, &current);
        for (next, out_coef) in complex.boundary(&head) {
            if *next == current {
                continue;
            }
            path.push(head.clone());
            path.push(next.clone());
            walk(complex, field, path, -sign * into * out_coef, end, out);
            path.pop();
            path.pop();
        }
    }

    let mut out = Vec::new();
    for start in from {
        let mut path = vec![start.clone()];
        walk(complex, field, &mut path, 1, end, &mut out);
    }
    out
}
