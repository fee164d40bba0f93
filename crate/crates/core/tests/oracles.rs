//! Independent recomputations checked against the library.

use std::collections::BTreeSet;

use graph_morse::config_complex::{build_d2, Cell};
use graph_morse::corpus;
use graph_morse::graph_model::{build_f1, build_spanning_tree, relabel_by_tree, Edge, Graph};
use graph_morse::morse_homology::cellular_homology_oracle;
use graph_morse::trial_fix::trial_f2;
use proptest::prelude::*;

/// Rank over the prime field `F_p` by plain Gaussian elimination.
fn rank_mod(rows: &[Vec<i64>], p: i64) -> usize {
    let mut m: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][col], p - 2, p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..m.len() {
            if i != rank && m[i][col] != 0 {
                let k = m[i][col];
                let pivot = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x = (*x - k * y).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: i64, mut e: i64, p: i64) -> i64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

const BIG: i64 = 1_000_000_007;

/// Brute-force cell enumeration straight from the definition: pairs of
/// closed graph cells with disjoint vertex sets.
fn brute_cells(g: &Graph) -> [BTreeSet<Cell>; 3] {
    let mut out: [BTreeSet<Cell>; 3] = Default::default();
    let verts: Vec<Vec<usize>> = g.vertices().map(|v| vec![v]).collect();
    let edges: Vec<Vec<usize>> = g.edges().iter().map(|e| vec![e.lo(), e.hi()]).collect();
    let all: Vec<&Vec<usize>> = verts.iter().chain(&edges).collect();
    for (i, x) in all.iter().enumerate() {
        for y in &all[i + 1..] {
            if x.iter().any(|v| y.contains(v)) {
                continue;
            }
            let cell = match (x.len(), y.len()) {
                (1, 1) => Cell::point(x[0], y[0]),
                (1, 2) => Cell::moving(x[0], Edge::new(y[0], y[1])),
                (2, 1) => Cell::moving(y[0], Edge::new(x[0], x[1])),
                _ => Cell::square(Edge::new(x[0], x[1]), Edge::new(y[0], y[1])),
            }
            .unwrap();
            out[x.len() + y.len() - 2].insert(cell);
        }
    }
    out
}

fn graphs() -> Vec<Graph> {
    let mut out: Vec<Graph> = (2..=5).flat_map(corpus::connected_graph_classes).collect();
    out.extend([corpus::complete(5), corpus::complete_bipartite(3, 3), corpus::petersen(), corpus::complete(6)]);
    out
}

#[test]
fn cells_match_brute_force() {
    for g in graphs() {
        let d = build_d2(&g).unwrap();
        let brute = brute_cells(&g);
        for dim in 0..3 {
            let built: BTreeSet<Cell> = d.cells(dim).iter().copied().collect();
            assert_eq!(built, brute[dim], "dim {dim} of {g:?}");
        }
        let n = g.vertex_count();
        assert_eq!(d.count(0), n * (n - 1) / 2);
        assert_eq!(d.count(1), g.edges().len() * (n - 2));
    }
}

#[test]
fn boundary_closure_and_shape() {
    for g in graphs() {
        let d = build_d2(&g).unwrap();
        for cell in d.cells(1) {
            let b = d.boundary(cell);
            assert_eq!(b.iter().map(|x| x.1).collect::<Vec<_>>(), vec![1, -1]);
        }
        for cell in d.cells(2) {
            let b = d.boundary(cell);
            assert_eq!(b.len(), 4);
            assert!(b.iter().all(|(f, k)| d.contains(f) && k.abs() == 1));
        }
    }
}

/// Free rank from ranks over a large prime; the count of torsion factors
/// divisible by `q` from the rank drop over `F_q`.
#[test]
fn homology_matches_modular_ranks() {
    for g in graphs() {
        let d = build_d2(&g).unwrap();
        let d1 = d.boundary_matrix(1).to_i64_rows();
        let d2 = d.boundary_matrix(2).to_i64_rows();
        let r1 = rank_mod(&d1, BIG);
        let r2 = rank_mod(&d2, BIG);
        let h = cellular_homology_oracle(&d);
        assert_eq!(h.free_rank, d.count(1) - r1 - r2, "{g:?}");
        assert_eq!(h.h0_rank, d.count(0) - r1);
        for q in [2, 3, 5, 7] {
            let drop = r2 - rank_mod(&d2, q);
            let divisible = h.torsion.iter().filter(|&&t| t % q as u64 == 0).count();
            assert_eq!(drop, divisible, "q = {q}, {g:?}");
        }
    }
}

#[test]
fn k5_torsion_seen_mod_two() {
    let d = build_d2(&corpus::complete(5)).unwrap();
    let d2 = d.boundary_matrix(2).to_i64_rows();
    assert_eq!(rank_mod(&d2, BIG) - rank_mod(&d2, 2), 1);
}

#[test]
fn trees_give_connected_complexes() {
    for n in 3..=6 {
        for g in corpus::connected_graph_classes(n) {
            if g.cycle_rank() != 0 {
                continue;
            }
            let d = build_d2(&g).unwrap();
            assert_eq!(cellular_homology_oracle(&d).h0_rank, 1, "{g:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// One-particle values and the trial function against their defining
    /// formulas, on the relabelled graph.
    #[test]
    fn f1_and_trial_formulas(seed in any::<u64>()) {
        let g = corpus::sample_graph(seed, 0, 2, 7);
        let t = build_spanning_tree(&g, None, None).unwrap();
        let (g, t, _) = relabel_by_tree(&g, &t);
        let f1 = build_f1(&g, &t);
        let fv = |v: usize| 2 * v as i64 - 2;
        let fe = |e: &Edge| fv(e.hi()) + if t.contains(e) { 0 } else { 2 };
        for v in g.vertices() {
            prop_assert_eq!(f1.vertex(v), fv(v));
            if let Some(e) = t.parent_edge(v) {
                prop_assert_eq!(f1.edge(&e), fv(v));
            }
        }
        let deleted = g.edges().iter().filter(|e| !t.contains(e)).count();
        prop_assert_eq!(deleted, g.cycle_rank());
        let d = build_d2(&g).unwrap();
        let trial = trial_f2(&d, &f1);
        for cell in d.all_cells() {
            let expected = match *cell {
                Cell::Point { a, b } => fv(a) + fv(b),
                Cell::Move { fixed, edge } => fv(fixed) + fe(&edge),
                Cell::Square { first, second } => fe(&first) + fe(&second),
            };
            prop_assert_eq!(trial.value(cell), expected);
        }
        let min = d.cells(0).iter().min_by_key(|p| trial.value(p)).unwrap();
        prop_assert_eq!(*min, Cell::Point { a: 1, b: 2 });
    }
}
