//! Finite cell complexes with explicit signed incidence.

use std::collections::HashMap;
use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;

use crate::integer_matrix::IntegerMatrix;

/// A cell knows its own dimension; everything else comes from the complex.
pub trait CellLike: Clone + Ord + Hash + Debug + Display {
    fn dim(&self) -> usize;
}

/// Cells grouped by dimension with boundary and coboundary tables.
///
/// Incidence coefficients are stored as `i64`. Boundaries are not required to
/// be regular; any integer coefficients are accepted.
#[derive(Debug, Clone)]
pub struct RegularComplex<C: CellLike> {
    cells: Vec<Vec<C>>,
    index: HashMap<C, usize>,
    boundary: Vec<Vec<Vec<(C, i64)>>>,
    coboundary: Vec<Vec<Vec<(C, i64)>>>,
}

impl<C: CellLike> RegularComplex<C> {
    /// `cells[d]` lists the `d`-cells in their canonical order. Panics if a
    /// boundary refers to a cell that is not present one dimension lower.
    pub fn new(cells: Vec<Vec<C>>, boundary_of: impl Fn(&C) -> Vec<(C, i64)>) -> Self {
        let mut index = HashMap::new();
        for (d, list) in cells.iter().enumerate() {
            for (i, c) in list.iter().enumerate() {
                assert_eq!(c.dim(), d, "cell {c} listed in dimension {d}");
                let prev = index.insert(c.clone(), i);
                assert!(prev.is_none(), "duplicate cell {c}");
            }
        }
        let mut boundary: Vec<Vec<Vec<(C, i64)>>> =
            cells.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        let mut coboundary = boundary.clone();
        for (d, list) in cells.iter().enumerate() {
            for (i, c) in list.iter().enumerate() {
                let faces = boundary_of(c);
                for (face, coef) in &faces {
                    assert_eq!(face.dim() + 1, d, "face {face} of {c} has wrong dimension");
                    let j = *index
                        .get(face)
                        .unwrap_or_else(|| panic!("face {face} of {c} missing from complex"));
                    coboundary[d - 1][j].push((c.clone(), *coef));
                }
                boundary[d][i] = faces;
            }
        }
        RegularComplex {
            cells,
            index,
            boundary,
            coboundary,
        }
    }

    /// Highest dimension with a slot (cells may be empty).
    pub fn top_dim(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn cells(&self, dim: usize) -> &[C] {
        self.cells.get(dim).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, dim: usize) -> usize {
        self.cells(dim).len()
    }

    pub fn all_cells(&self) -> impl Iterator<Item = &C> {
        self.cells.iter().flatten()
    }

    pub fn contains(&self, cell: &C) -> bool {
        self.index_of(cell).is_some()
    }

    /// Position of the cell within its dimension.
    pub fn index_of(&self, cell: &C) -> Option<usize> {
        let i = *self.index.get(cell)?;
        (self.cells.get(cell.dim())?.get(i) == Some(cell)).then_some(i)
    }

    pub fn boundary(&self, cell: &C) -> &[(C, i64)] {
        let i = self.index_of(cell).unwrap_or_else(|| panic!("unknown cell {cell}"));
        &self.boundary[cell.dim()][i]
    }

    pub fn coboundary(&self, cell: &C) -> &[(C, i64)] {
        let i = self.index_of(cell).unwrap_or_else(|| panic!("unknown cell {cell}"));
        &self.coboundary[cell.dim()][i]
    }

    /// Incidence number `<boundary(upper), lower>`.
    pub fn incidence(&self, upper: &C, lower: &C) -> i64 {
        self.boundary(upper)
            .iter()
            .filter(|(c, _)| c == lower)
            .map(|(_, k)| k)
            .sum()
    }

    /// Matrix of the boundary map from `dim`-chains to `(dim-1)`-chains; one
    /// column per `dim`-cell.
    pub fn boundary_matrix(&self, dim: usize) -> IntegerMatrix {
        let rows = if dim == 0 { 0 } else { self.count(dim - 1) };
        let mut m = IntegerMatrix::zeros(rows, self.count(dim));
        if dim == 0 {
            return m;
        }
        for (j, c) in self.cells(dim).iter().enumerate() {
            for (face, coef) in self.boundary(c) {
                let i = self.index_of(face).unwrap();
                let v = m.get(i, j) + BigInt::from(*coef);
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(d, l)| if d % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }
}
