//! Morse complex of a gradient field and integral homology, computed twice:
//! once on the critical cells and once on the full complex.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{CellLike, RegularComplex};
use crate::discrete_morse::{enumerate_vpaths, flow_order, GradientField, PathEnd};
use crate::integer_matrix::{smith_normal_form, IntegerMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("gradient field has a closed V-path")]
    CyclicField,
    #[error("boundary flow from {0} did not terminate")]
    NonTermination(String),
}

/// Chain complex on the critical cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseComplex<C: CellLike> {
    /// Critical cells of dimension 0, 1, 2, in sorted order.
    pub critical: [Vec<C>; 3],
    /// Rows: critical 0-cells. Columns: critical 1-cells.
    pub boundary1: IntegerMatrix,
    /// Rows: critical 1-cells. Columns: critical 2-cells.
    pub boundary2: IntegerMatrix,
}

impl<C: CellLike> MorseComplex<C> {
    pub fn counts(&self) -> [usize; 3] {
        [self.critical[0].len(), self.critical[1].len(), self.critical[2].len()]
    }

    /// Coefficient of `face` in the Morse boundary of `cell`.
    pub fn coefficient(&self, cell: &C, face: &C) -> i64 {
        let m = match cell.dim() {
            1 => &self.boundary1,
            2 => &self.boundary2,
            _ => return 0,
        };
        let col = self.critical[cell.dim()].iter().position(|c| c == cell);
        let row = self.critical[cell.dim() - 1].iter().position(|c| c == face);
        match (row, col) {
            (Some(i), Some(j)) => i64::try_from(m.get(i, j)).expect("coefficient exceeds i64"),
            _ => 0,
        }
    }

    /// Morse boundary of a critical cell as a sparse chain.
    pub fn boundary_of(&self, cell: &C) -> Vec<(C, i64)> {
        if cell.dim() == 0 || cell.dim() > 2 {
            return Vec::new();
        }
        self.critical[cell.dim() - 1]
            .iter()
            .map(|f| (f.clone(), self.coefficient(cell, f)))
            .filter(|(_, k)| *k != 0)
            .collect()
    }
}

type Chain<C> = BTreeMap<C, i64>;

fn add_scaled<C: CellLike>(chain: &mut Chain<C>, terms: &[(C, i64)], scale: i64) {
    for (c, k) in terms {
        let e = chain.entry(c.clone()).or_insert(0);
        *e += scale * k;
        if *e == 0 {
            chain.remove(c);
        }
    }
}

/// Pushes a chain of `(dim)`-cells down the gradient flow until only critical
/// cells and heads remain, then keeps the critical part.
fn flow_chain<C: CellLike>(
    complex: &RegularComplex<C>,
    field: &GradientField<C>,
    rank: &BTreeMap<C, usize>,
    start: &C,
) -> Result<Chain<C>, HomologyError> {
    let mut chain: Chain<C> = BTreeMap::new();
    add_scaled(&mut chain, complex.boundary(start), 1);
    let bound = field.pair_count() + 1;
    for _ in 0..=bound {
        let next = chain
            .keys()
            .filter(|c| field.is_tail(c))
            .min_by_key(|c| rank[*c])
            .cloned();
        let Some(tail) = next else {
            chain.retain(|c, _| field.is_critical(c));
            return Ok(chain);
        };
        let head = field.head_of(&tail).unwrap();
        let s = complex.incidence(head, &tail);
        let c = chain[&tail];
        add_scaled(&mut chain, complex.boundary(head), -c * s);
    }
    Err(HomologyError::NonTermination(start.to_string()))
}

fn assemble<C: CellLike>(
    critical: [Vec<C>; 3],
    mut column: impl FnMut(&C) -> Result<Chain<C>, HomologyError>,
) -> Result<MorseComplex<C>, HomologyError> {
    let mut mats = Vec::new();
    for dim in 1..=2 {
        let rows = &critical[dim - 1];
        let cols = &critical[dim];
        let mut m = IntegerMatrix::zeros(rows.len(), cols.len());
        for (j, cell) in cols.iter().enumerate() {
            let chain = column(cell)?;
            for (i, r) in rows.iter().enumerate() {
                if let Some(k) = chain.get(r) {
                    m.set(i, j, BigInt::from(*k));
                }
            }
        }
        mats.push(m);
    }
    let boundary2 = mats.pop().unwrap();
    let boundary1 = mats.pop().unwrap();
    Ok(MorseComplex {
        critical,
        boundary1,
        boundary2,
    })
}

fn critical_by_dim<C: CellLike>(field: &GradientField<C>) -> [Vec<C>; 3] {
    [field.critical_in_dim(0), field.critical_in_dim(1), field.critical_in_dim(2)]
}

/// Morse boundary by substitution: each tail in the boundary chain is
/// replaced using the boundary of its head, processed in flow order.
pub fn morse_boundary<C: CellLike>(
    complex: &RegularComplex<C>,
    field: &GradientField<C>,
) -> Result<MorseComplex<C>, HomologyError> {
    let mut rank = BTreeMap::new();
    for dim in 0..2 {
        let order = flow_order(complex, field, dim).ok_or(HomologyError::CyclicField)?;
        rank.extend(order.into_iter().enumerate().map(|(i, c)| (c, i)));
    }
    assemble(critical_by_dim(field), |cell| flow_chain(complex, field, &rank, cell))
}

/// Morse boundary by summing signed V-paths from each boundary face.
pub fn morse_boundary_by_vpaths<C: CellLike>(
    complex: &RegularComplex<C>,
    field: &GradientField<C>,
) -> Result<MorseComplex<C>, HomologyError> {
    if !crate::discrete_morse::check_acyclic(complex, field) {
        return Err(HomologyError::CyclicField);
    }
    assemble(critical_by_dim(field), |cell| {
        let mut chain = BTreeMap::new();
        for (face, coef) in complex.boundary(cell) {
            for path in enumerate_vpaths(complex, field, std::slice::from_ref(face), PathEnd::Critical) {
                add_scaled(&mut chain, &[(path.end().clone(), path.multiplicity)], *coef);
            }
        }
        Ok(chain)
    })
}

/// Integral homology of a complex of dimension at most two.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyResult {
    #[serde(rename = "h1_free_rank")]
    pub free_rank: usize,
    #[serde(rename = "h1_torsion")]
    pub torsion: Vec<u64>,
    pub h0_rank: usize,
    /// Informational only.
    pub h2_rank: usize,
}

impl HomologyResult {
    pub fn betti(&self) -> [usize; 3] {
        [self.h0_rank, self.free_rank, self.h2_rank]
    }

    /// `Z^2 + Z_2` style rendering of the first group.
    pub fn h1_string(&self) -> String {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z_{d}")));
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

fn homology_from(counts: [usize; 3], d1: &IntegerMatrix, d2: &IntegerMatrix) -> HomologyResult {
    let snf1 = smith_normal_form(d1);
    let snf2 = smith_normal_form(d2);
    HomologyResult {
        free_rank: counts[1] - snf1.rank() - snf2.rank(),
        torsion: snf2
            .torsion()
            .map(|d| u64::try_from(d).expect("torsion coefficient exceeds u64"))
            .collect(),
        h0_rank: counts[0] - snf1.rank(),
        h2_rank: counts[2] - snf2.rank(),
    }
}

/// Homology of the Morse complex.
pub fn homology_h1<C: CellLike>(mc: &MorseComplex<C>) -> HomologyResult {
    homology_from(mc.counts(), &mc.boundary1, &mc.boundary2)
}

/// Homology straight from the cellular boundary matrices, with no reference
/// to any Morse function.
pub fn cellular_homology_oracle<C: CellLike>(complex: &RegularComplex<C>) -> HomologyResult {
    let counts = [complex.count(0), complex.count(1), complex.count(2)];
    homology_from(counts, &complex.boundary_matrix(1), &complex.boundary_matrix(2))
}

/// Critical counts equal Betti numbers in every dimension.
pub fn is_perfect(critical_counts: [usize; 3], homology: &HomologyResult) -> bool {
    critical_counts == homology.betti()
}
