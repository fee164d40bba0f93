//! Morse function on the two-particle complex built from the one-particle
//! function.
//!
//! The trial function adds the one-particle values of the two factors of a
//! cell. It fails to be Morse at exactly two kinds of sites, and each failure
//! is repaired by raising a single 1-cell by one:
//!
//! 1. Squares `e(u) x e(v)` whose factors are both parent edges. The square
//!    and one of `u x e(v)`, `v x e(u)` go up by one.
//! 2. Points `(u,v)` of two siblings in the spanning tree. One of
//!    `u x e(v)`, `v x e(u)` goes up by one.
//!
//! Every other cell keeps its trial value. The repair double-checks each
//! claimed local property as it goes and reports a [`RepairError`] if one
//! does not hold.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::CellLike;
use crate::config_complex::{Cell, TwoParticleComplex};
use crate::discrete_morse::{check_morse, CellFunction, GradientField};
use crate::graph_model::{Edge, Graph, OneParticleMorse, RootedSpanningTree, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{fact} does not hold at {cell}: {detail}")]
pub struct RepairError {
    pub fact: &'static str,
    pub cell: String,
    pub detail: String,
}

/// Which of the two admissible 1-cells to raise at a repair site `{u,v}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreakPolicy {
    /// Raise `u x e(v)` with `u = min(u,v)`.
    #[default]
    Min,
    /// Raise `u x e(v)` with `u = max(u,v)`.
    Max,
}

impl TieBreakPolicy {
    pub const ALL: [TieBreakPolicy; 2] = [TieBreakPolicy::Min, TieBreakPolicy::Max];

    /// The cell `u x e(v)` chosen for the site `{a,b}`.
    fn pick(self, tree: &RootedSpanningTree, a: Vertex, b: Vertex) -> Cell {
        let (u, v) = match self {
            TieBreakPolicy::Min => (a.min(b), a.max(b)),
            TieBreakPolicy::Max => (a.max(b), a.min(b)),
        };
        Cell::moving(u, tree.parent_edge(v).unwrap()).unwrap()
    }
}

impl fmt::Display for TieBreakPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieBreakPolicy::Min => "min",
            TieBreakPolicy::Max => "max",
        })
    }
}

impl std::str::FromStr for TieBreakPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" => Ok(TieBreakPolicy::Min),
            "max" => Ok(TieBreakPolicy::Max),
            other => Err(format!("unknown tie-break policy {other:?} (expected min or max)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairFix {
    /// The square (first step) or point (third step) that needed fixing.
    pub site: Cell,
    pub raised: Cell,
    pub amount: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairLog {
    pub step1_fixes: Vec<RepairFix>,
    pub step3_fixes: Vec<RepairFix>,
    pub tie_break_policy: TieBreakPolicy,
}

impl RepairLog {
    pub fn raised_cells(&self) -> impl Iterator<Item = &Cell> {
        self.step1_fixes.iter().chain(&self.step3_fixes).map(|f| &f.raised)
    }
}

/// Edges at a vertex split into deleted edges, tree edges to children, and
/// the parent edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeClasses {
    pub deleted: Vec<Vec<Edge>>,
    pub tree: Vec<Vec<Edge>>,
    pub parent: Vec<Option<Edge>>,
}

impl EdgeClasses {
    pub fn new(graph: &Graph, tree: &RootedSpanningTree) -> Self {
        let mut deleted = vec![Vec::new(); graph.vertex_count()];
        let mut children = vec![Vec::new(); graph.vertex_count()];
        for v in graph.vertices() {
            for &w in graph.neighbors(v) {
                let e = Edge::new(v, w);
                if !tree.contains(&e) {
                    deleted[v - 1].push(e);
                } else if tree.parent_edge(v) != Some(e) {
                    children[v - 1].push(e);
                }
            }
        }
        EdgeClasses {
            deleted,
            tree: children,
            parent: graph.vertices().map(|v| tree.parent_edge(v)).collect(),
        }
    }

    pub fn deleted_at(&self, v: Vertex) -> &[Edge] {
        &self.deleted[v - 1]
    }

    pub fn tree_at(&self, v: Vertex) -> &[Edge] {
        &self.tree[v - 1]
    }

    pub fn parent_edge(&self, v: Vertex) -> Option<Edge> {
        self.parent[v - 1]
    }
}

/// Sum of one-particle values over the two factors of each cell.
pub fn trial_f2(complex: &TwoParticleComplex, f1: &OneParticleMorse) -> CellFunction<Cell> {
    CellFunction::from_fn(complex, |cell| match *cell {
        Cell::Point { a, b } => f1.vertex(a) + f1.vertex(b),
        Cell::Move { fixed, edge } => f1.vertex(fixed) + f1.edge(&edge),
        Cell::Square { first, second } => f1.edge(&first) + f1.edge(&second),
    })
}

fn fail(fact: &'static str, cell: &Cell, detail: impl Into<String>) -> RepairError {
    RepairError {
        fact,
        cell: cell.to_string(),
        detail: detail.into(),
    }
}

fn names(cells: &[Cell]) -> String {
    cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

/// Faces of `cell` whose value is at least the cell's value.
fn faces_not_below(complex: &TwoParticleComplex, f: &CellFunction<Cell>, cell: &Cell) -> Vec<Cell> {
    let v = f.value(cell);
    complex
        .boundary(cell)
        .iter()
        .filter(|(c, _)| f.value(c) >= v)
        .map(|(c, _)| *c)
        .collect()
}

/// Cofaces of `cell` whose value is at most the cell's value.
fn cofaces_not_above(complex: &TwoParticleComplex, f: &CellFunction<Cell>, cell: &Cell) -> Vec<Cell> {
    let v = f.value(cell);
    complex
        .coboundary(cell)
        .iter()
        .filter(|(c, _)| f.value(c) <= v)
        .map(|(c, _)| *c)
        .collect()
}

fn same_set(found: &[Cell], expected: &[Cell]) -> bool {
    found.iter().collect::<BTreeSet<_>>() == expected.iter().collect::<BTreeSet<_>>()
}

/// Repairs the trial function into a discrete Morse function.
///
/// `tree` must be the spanning tree the complex's graph was labelled by.
pub fn repair(
    complex: &TwoParticleComplex,
    trial: &CellFunction<Cell>,
    tree: &RootedSpanningTree,
    policy: TieBreakPolicy,
) -> Result<(CellFunction<Cell>, RepairLog), RepairError> {
    let e = |v: Vertex| tree.parent_edge(v).unwrap();
    let mut bar = trial.clone();
    let mut log = RepairLog {
        step1_fixes: Vec::new(),
        step3_fixes: Vec::new(),
        tie_break_policy: policy,
    };

    // Step 1: squares.
    for sq in complex.cells(2) {
        let Cell::Square { first, second } = *sq else { unreachable!() };
        let wrong = faces_not_below(complex, trial, sq);
        match (tree.child_of(&first), tree.child_of(&second)) {
            (Some(u), Some(v)) => {
                let beta1 = Cell::moving(u, e(v)).unwrap();
                let beta2 = Cell::moving(v, e(u)).unwrap();
                let value = trial.value(sq);
                if !same_set(&wrong, &[beta1, beta2])
                    || trial.value(&beta1) != value
                    || trial.value(&beta2) != value
                {
                    return Err(fail(
                        "two parent-edge factors",
                        sq,
                        format!("expected faces {beta1}, {beta2} level with the square, found [{}]", names(&wrong)),
                    ));
                }
                let raised = policy.pick(tree, u, v);
                bar.add(sq, 1);
                bar.add(&raised, 1);
                log.step1_fixes.push(RepairFix {
                    site: *sq,
                    raised,
                    amount: 1,
                });
            }
            (None, None) => {
                if !wrong.is_empty() {
                    return Err(fail("two deleted factors", sq, format!("faces not below: [{}]", names(&wrong))));
                }
            }
            (Some(v), None) | (None, Some(v)) => {
                let deleted = if tree.child_of(&first).is_some() { second } else { first };
                let expected = Cell::moving(v, deleted).unwrap();
                if wrong != [expected] {
                    return Err(fail(
                        "one deleted factor",
                        sq,
                        format!("expected only {expected} not below, found [{}]", names(&wrong)),
                    ));
                }
            }
        }
    }
    for sq in complex.cells(2) {
        let wrong = faces_not_below(complex, &bar, sq);
        if wrong.len() > 1 {
            return Err(fail("square condition after step 1", sq, names(&wrong)));
        }
    }

    // Step 2: edges need no change, only verification.
    for cell in complex.cells(1) {
        let Cell::Move { fixed: v, edge } = *cell else { unreachable!() };
        let touches = tree.parent_edge(v).is_some_and(|ev| ev.meets(&edge));
        let fact = match (tree.contains(&edge), touches) {
            (true, true) => "parent-edge factor meeting e(v)",
            (false, true) => "deleted factor meeting e(v)",
            (true, false) => "parent-edge factor disjoint from e(v)",
            (false, false) => "deleted factor disjoint from e(v)",
        };
        let up = cofaces_not_above(complex, &bar, cell);
        let down = faces_not_below(complex, &bar, cell);
        if up.len() > 1 || down.len() > 1 {
            return Err(fail(
                fact,
                cell,
                format!("cofaces not above [{}], faces not below [{}]", names(&up), names(&down)),
            ));
        }
    }

    // Step 3: points. Check every site against the step-1 function first,
    // then apply the sibling fixes.
    let mut sites = Vec::new();
    for pt in complex.cells(0) {
        let Cell::Point { a, b } = *pt else { unreachable!() };
        let up = cofaces_not_above(complex, &bar, pt);
        if a == tree.root() {
            let expected: Vec<Cell> = Cell::moving(a, e(b)).into_iter().collect();
            if up != expected {
                return Err(fail("point at the root", pt, format!("cofaces not above [{}]", names(&up))));
            }
        } else if tree.parent(b) == Some(a) {
            let expected = Cell::moving(b, e(a)).unwrap();
            if up != [expected] {
                return Err(fail(
                    "point on a parent edge",
                    pt,
                    format!("expected only {expected}, found [{}]", names(&up)),
                ));
            }
        } else if tree.parent(a) == tree.parent(b) {
            let beta1 = Cell::moving(a, e(b)).unwrap();
            let beta2 = Cell::moving(b, e(a)).unwrap();
            let value = bar.value(pt);
            if !same_set(&up, &[beta1, beta2]) || bar.value(&beta1) != value || bar.value(&beta2) != value {
                return Err(fail(
                    "point of two siblings",
                    pt,
                    format!("expected {beta1}, {beta2} level with the point, found [{}]", names(&up)),
                ));
            }
            sites.push((*pt, policy.pick(tree, a, b)));
        } else if up.len() != 1 {
            return Err(fail(
                "point with disjoint parent edges",
                pt,
                format!("cofaces not above [{}]", names(&up)),
            ));
        }
    }
    let mut f2 = bar;
    for (site, raised) in sites {
        f2.add(&raised, 1);
        log.step3_fixes.push(RepairFix { site, raised, amount: 1 });
    }

    let violations = check_morse(complex, &f2).expect("repaired function is total");
    if let Some(v) = violations.first() {
        return Err(fail(
            "repaired function is Morse",
            &v.cell,
            format!("cofaces not above [{}], faces not below [{}]", names(&v.higher), names(&v.lower)),
        ));
    }
    Ok((f2, log))
}

/// Critical cells grouped by dimension.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CriticalCells {
    pub dim0: BTreeSet<Cell>,
    pub dim1: BTreeSet<Cell>,
    pub dim2: BTreeSet<Cell>,
}

impl CriticalCells {
    pub fn from_field(field: &GradientField<Cell>) -> Self {
        let mut out = CriticalCells::default();
        for c in field.critical() {
            out.dim_mut(c.dim()).insert(*c);
        }
        out
    }

    fn dim_mut(&mut self, dim: usize) -> &mut BTreeSet<Cell> {
        match dim {
            0 => &mut self.dim0,
            1 => &mut self.dim1,
            2 => &mut self.dim2,
            _ => unreachable!("two-particle cells have dimension at most 2"),
        }
    }

    pub fn dim(&self, dim: usize) -> &BTreeSet<Cell> {
        match dim {
            0 => &self.dim0,
            1 => &self.dim1,
            _ => &self.dim2,
        }
    }

    pub fn counts(&self) -> [usize; 3] {
        [self.dim0.len(), self.dim1.len(), self.dim2.len()]
    }
}

/// Predicts the critical cells of the repaired function directly from the
/// graph and tree:
///
/// - the point `(1,2)`;
/// - edges `v x e` with `e` deleted and either `v = 1` or `e` meeting `e(v)`;
/// - for siblings `u, v`, the policy's choice among `u x e(v)`, `v x e(u)`;
/// - squares of two disjoint deleted edges.
///
/// `graph` must be labelled by the tree (see `relabel_by_tree`).
pub fn classify_critical(graph: &Graph, tree: &RootedSpanningTree, policy: TieBreakPolicy) -> CriticalCells {
    let mut out = CriticalCells::default();
    if graph.vertex_count() < 2 {
        return out;
    }
    out.dim0.insert(Cell::Point { a: 1, b: 2 });
    let deleted: Vec<Edge> = graph.edges().iter().copied().filter(|e| !tree.contains(e)).collect();
    for &e in &deleted {
        for v in graph.vertices() {
            if e.contains(v) {
                continue;
            }
            let meets = tree.parent_edge(v).is_some_and(|ev| ev.meets(&e));
            if v == tree.root() || meets {
                out.dim1.insert(Cell::Move { fixed: v, edge: e });
            }
        }
    }
    for u in graph.vertices() {
        for v in u + 1..=graph.vertex_count() {
            if u != tree.root() && tree.parent(u).is_some() && tree.parent(u) == tree.parent(v) {
                out.dim1.insert(policy.pick(tree, u, v));
            }
        }
    }
    for (i, &e1) in deleted.iter().enumerate() {
        for &e2 in &deleted[i + 1..] {
            if let Some(sq) = Cell::square(e1, e2) {
                out.dim2.insert(sq);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config_complex::build_d2;
    use crate::discrete_morse::build_gradient_field;
    use crate::graph_model::{build_f1, build_spanning_tree};

    fn c(s: &str) -> Cell {
        s.parse().unwrap()
    }

    fn setup(n: usize, edges: &[(usize, usize)], tree: &[(usize, usize)]) -> (Graph, RootedSpanningTree, OneParticleMorse, TwoParticleComplex) {
        let g = Graph::new(n, edges.iter().copied()).unwrap();
        let tree_edges: Vec<Edge> = tree.iter().map(|&(a, b)| Edge::new(a, b)).collect();
        let t = build_spanning_tree(&g, Some(&tree_edges), Some(1)).unwrap();
        let f1 = build_f1(&g, &t);
        let d = build_d2(&g).unwrap();
        (g, t, f1, d)
    }

    fn lasso() -> (Graph, RootedSpanningTree, OneParticleMorse, TwoParticleComplex) {
        setup(4, &[(1, 2), (2, 3), (2, 4), (3, 4)], &[(1, 2), (2, 3), (2, 4)])
    }

    fn bowtie() -> (Graph, RootedSpanningTree, OneParticleMorse, TwoParticleComplex) {
        setup(
            5,
            &[(1, 2), (2, 3), (1, 3), (2, 4), (2, 5), (4, 5)],
            &[(1, 2), (2, 3), (2, 4), (2, 5)],
        )
    }

    fn set(cells: &[&str]) -> BTreeSet<Cell> {
        cells.iter().map(|s| c(s)).collect()
    }

    #[test]
    fn lasso_trial_values() {
        let (_, _, f1, d) = lasso();
        let f = trial_f2(&d, &f1);
        assert_eq!(f.value(&c("(1,2)")), 2);
        assert_eq!(f.value(&c("(3,4)x(1,2)")), 10);
        assert_eq!(f.value(&c("(3,4)")), 10);
        assert_eq!(f.value(&c("3x(2,4)")), 10);
        assert_eq!(f.value(&c("4x(2,3)")), 10);
        let min = d.cells(0).iter().min_by_key(|p| f.value(p)).unwrap();
        assert_eq!(*min, c("(1,2)"));
        assert_eq!(d.cells(0).iter().filter(|p| f.value(p) == 2).count(), 1);
    }

    #[test]
    fn lasso_trial_has_one_violation() {
        let (_, _, f1, d) = lasso();
        let v = check_morse(&d, &trial_f2(&d, &f1)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].cell, c("(3,4)"));
        assert_eq!(v[0].higher.iter().copied().collect::<BTreeSet<_>>(), set(&["4x(2,3)", "3x(2,4)"]));
        assert!(v[0].lower.is_empty());
    }

    #[test]
    fn lasso_repair() {
        let (g, t, f1, d) = lasso();
        let trial = trial_f2(&d, &f1);
        let (f2, log) = repair(&d, &trial, &t, TieBreakPolicy::Min).unwrap();
        assert!(log.step1_fixes.is_empty());
        assert_eq!(
            log.step3_fixes,
            vec![RepairFix {
                site: c("(3,4)"),
                raised: c("3x(2,4)"),
                amount: 1
            }]
        );
        assert_eq!(f2.value(&c("3x(2,4)")), 11);
        let field = build_gradient_field(&d, &f2).unwrap();
        let crit = CriticalCells::from_field(&field);
        assert_eq!(crit.dim0, set(&["(1,2)"]));
        assert_eq!(crit.dim1, set(&["3x(2,4)", "1x(3,4)"]));
        assert!(crit.dim2.is_empty());
        assert_eq!(classify_critical(&g, &t, TieBreakPolicy::Min), crit);
    }

    #[test]
    fn lasso_max_policy_raises_the_other_edge() {
        let (g, t, f1, d) = lasso();
        let (f2, log) = repair(&d, &trial_f2(&d, &f1), &t, TieBreakPolicy::Max).unwrap();
        assert_eq!(log.step3_fixes[0].raised, c("4x(2,3)"));
        let crit = CriticalCells::from_field(&build_gradient_field(&d, &f2).unwrap());
        assert_eq!(crit.dim1, set(&["4x(2,3)", "1x(3,4)"]));
        assert_eq!(classify_critical(&g, &t, TieBreakPolicy::Max), crit);
    }

    #[test]
    fn bowtie_repair() {
        let (g, t, f1, d) = bowtie();
        let trial = trial_f2(&d, &f1);
        let (f2, log) = repair(&d, &trial, &t, TieBreakPolicy::Min).unwrap();
        let fixes: Vec<(Cell, Cell, i64)> = log
            .step3_fixes
            .iter()
            .map(|f| (f.site, f.raised, trial.value(&f.site)))
            .collect();
        assert_eq!(
            fixes,
            vec![
                (c("(3,4)"), c("3x(2,4)"), 10),
                (c("(3,5)"), c("3x(2,5)"), 12),
                (c("(4,5)"), c("4x(2,5)"), 14),
            ]
        );
        // The only squares are (1,2)x(4,5), (1,3)x(2,4), (1,3)x(2,5), (1,3)x(4,5),
        // (2,3)x(4,5); none has two parent-edge factors.
        assert!(log.step1_fixes.is_empty());
        let crit = CriticalCells::from_field(&build_gradient_field(&d, &f2).unwrap());
        assert_eq!(crit.dim0, set(&["(1,2)"]));
        assert_eq!(crit.dim1, set(&["1x(4,5)", "2x(1,3)", "3x(2,4)", "3x(2,5)", "4x(2,5)"]));
        assert_eq!(crit.dim2, set(&["(1,3)x(4,5)"]));
        assert_eq!(classify_critical(&g, &t, TieBreakPolicy::Min), crit);
    }

    #[test]
    fn star_repair() {
        let (g, t, f1, d) = setup(4, &[(1, 2), (2, 3), (2, 4)], &[(1, 2), (2, 3), (2, 4)]);
        let (f2, log) = repair(&d, &trial_f2(&d, &f1), &t, TieBreakPolicy::Min).unwrap();
        assert!(log.step1_fixes.is_empty());
        assert_eq!(log.step3_fixes.len(), 1);
        assert_eq!(log.step3_fixes[0].site, c("(3,4)"));
        assert!(check_morse(&d, &f2).unwrap().is_empty());
        let crit = classify_critical(&g, &t, TieBreakPolicy::Min);
        assert_eq!(crit.counts(), [1, 1, 0]);
    }

    #[test]
    fn path_needs_no_fixes() {
        let (_, t, f1, d) = setup(3, &[(1, 2), (2, 3)], &[(1, 2), (2, 3)]);
        let trial = trial_f2(&d, &f1);
        assert!(check_morse(&d, &trial).unwrap().is_empty());
        let (f2, log) = repair(&d, &trial, &t, TieBreakPolicy::Min).unwrap();
        assert!(log.step1_fixes.is_empty() && log.step3_fixes.is_empty());
        assert_eq!(f2, trial);
    }

    #[test]
    fn step_one_fires_on_disjoint_parent_edges() {
        // Path 1-2-3-4: e(2) = (1,2) and e(4) = (3,4) are disjoint.
        let (g, t, f1, d) = setup(4, &[(1, 2), (2, 3), (3, 4)], &[(1, 2), (2, 3), (3, 4)]);
        let trial = trial_f2(&d, &f1);
        let (f2, log) = repair(&d, &trial, &t, TieBreakPolicy::Min).unwrap();
        assert_eq!(
            log.step1_fixes,
            vec![RepairFix {
                site: c("(1,2)x(3,4)"),
                raised: c("2x(3,4)"),
                amount: 1
            }]
        );
        assert_eq!(f2.value(&c("(1,2)x(3,4)")), trial.value(&c("(1,2)x(3,4)")) + 1);
        let crit = CriticalCells::from_field(&build_gradient_field(&d, &f2).unwrap());
        assert_eq!(crit, classify_critical(&g, &t, TieBreakPolicy::Min));
        assert_eq!(crit.counts(), [1, 0, 0]);
    }

    #[test]
    fn repair_rejects_a_bad_tree() {
        // Root with two children breaks the point-at-the-root property.
        let g = Graph::new(3, [(1, 2), (1, 3)]).unwrap();
        let d = build_d2(&g).unwrap();
        let mut trial = CellFunction::from_fn(&d, |c| c.dim() as i64);
        trial.set(c("(2,3)"), 0);
        let t = build_spanning_tree(&g, None, Some(2)).unwrap();
        assert!(repair(&d, &trial, &t, TieBreakPolicy::Min).is_err());
    }

    #[test]
    fn edge_classes_partition_incident_edges() {
        let (g, t, _, _) = bowtie();
        let classes = EdgeClasses::new(&g, &t);
        for v in g.vertices() {
            let mut all: Vec<Edge> = classes.deleted_at(v).to_vec();
            all.extend_from_slice(classes.tree_at(v));
            all.extend(classes.parent_edge(v));
            all.sort();
            let mut incident: Vec<Edge> = g.neighbors(v).iter().map(|&w| Edge::new(v, w)).collect();
            incident.sort();
            assert_eq!(all, incident);
        }
        assert_eq!(classes.parent_edge(1), None);
        assert_eq!(classes.deleted_at(2), &[] as &[Edge]);
        assert_eq!(classes.tree_at(2).len(), 3);
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("min".parse::<TieBreakPolicy>(), Ok(TieBreakPolicy::Min));
        assert_eq!("max".parse::<TieBreakPolicy>(), Ok(TieBreakPolicy::Max));
        assert!("middle".parse::<TieBreakPolicy>().is_err());
    }
}
