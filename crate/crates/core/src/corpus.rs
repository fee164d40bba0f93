//! Test graphs: named families, seeded random graphs, and exhaustive
//! enumeration of small connected graphs up to isomorphism.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph_model::{Graph, Vertex};

/// Paper-style labelling: vertex 1 is a leaf hanging off vertex 2.
pub fn lasso() -> Graph {
    Graph::new(4, [(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap()
}

pub fn bowtie() -> Graph {
    Graph::new(5, [(1, 2), (2, 3), (1, 3), (2, 4), (2, 5), (4, 5)]).unwrap()
}

/// `K(1,3)` with centre 2.
pub fn star() -> Graph {
    Graph::new(4, [(1, 2), (2, 3), (2, 4)]).unwrap()
}

pub fn path(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|i| (i, i + 1))).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    Graph::new(n, (1..n).map(|i| (i, i + 1)).chain([(1, n)])).unwrap()
}

pub fn complete(n: usize) -> Graph {
    Graph::new(n, (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b)))).unwrap()
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    Graph::new(a + b, (1..=a).flat_map(|i| (a + 1..=a + b).map(move |j| (i, j)))).unwrap()
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i + 1, (i + 1) % 5 + 1));
        edges.push((i + 1, i + 6));
        edges.push((i + 6, (i + 2) % 5 + 6));
    }
    Graph::new(10, edges).unwrap()
}

/// Looks up `lasso`, `bowtie`, `star`, `petersen`, `pathN`, `cycleN`, `kN`
/// and `kA,B`.
pub fn named(name: &str) -> Option<Graph> {
    let num = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
    match name {
        "lasso" => Some(lasso()),
        "bowtie" => Some(bowtie()),
        "star" => Some(star()),
        "petersen" => Some(petersen()),
        _ => {
            if let Some((a, b)) = name.strip_prefix('k').and_then(|s| s.split_once(',')) {
                let (a, b) = (a.parse().ok()?, b.parse().ok()?);
                return (a >= 1 && b >= 1).then(|| complete_bipartite(a, b));
            }
            if let Some(n) = num("path") {
                return (n >= 1).then(|| path(n));
            }
            if let Some(n) = num("cycle") {
                return (n >= 3).then(|| cycle(n));
            }
            num("k").filter(|&n| n >= 1).map(complete)
        }
    }
}

/// Connected graph on `n` vertices: a random tree with shuffled labels plus
/// each remaining pair with probability `p`.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut labels: Vec<Vertex> = (1..=n).collect();
    labels.shuffle(rng);
    let mut present = vec![vec![false; n + 1]; n + 1];
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (labels[i], labels[j]);
        present[a][b] = true;
        present[b][a] = true;
        edges.push((a, b));
    }
    for a in 1..=n {
        for b in a + 1..=n {
            if !present[a][b] && rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges.shuffle(rng);
    Graph::new(n, edges).expect("construction is connected and simple")
}

/// The graph for one sample of a seeded run; samples are independent of
/// each other, so they can be generated in any order.
pub fn sample_graph(seed: u64, index: u64, min_vertices: usize, max_vertices: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = rng.gen_range(min_vertices..=max_vertices);
    let p = rng.gen_range(0.0..0.7);
    random_connected_graph(&mut rng, n, p)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism class of connected graphs on `n`
/// vertices (`1 <= n <= 6`), each the lexicographically smallest edge mask of
/// its class.
pub fn connected_graph_classes(n: usize) -> Vec<Graph> {
    assert!((1..=6).contains(&n), "exhaustive enumeration is limited to 6 vertices");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let index = |a: usize, b: usize| pairs.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
    let perm_maps: Vec<Vec<usize>> = permutations(n)
        .iter()
        .map(|p| pairs.iter().map(|&(a, b)| index(p[a], p[b])).collect())
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let is_min = perm_maps.iter().all(|m| {
            let mut image = 0u32;
            for (i, &j) in m.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    image |= 1 << j;
                }
            }
            image >= mask
        });
        if !is_min {
            continue;
        }
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &(a, b))| (a + 1, b + 1));
        if let Ok(g) = Graph::new(n, edges) {
            out.push(g);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts() {
        // Connected graphs up to isomorphism on 1..=6 vertices.
        let counts: Vec<usize> = (1..=6).map(|n| connected_graph_classes(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn named_lookup() {
        assert_eq!(named("k5").unwrap().edges().len(), 10);
        assert_eq!(named("k3,3").unwrap().edges().len(), 9);
        assert_eq!(named("cycle4").unwrap().edges().len(), 4);
        assert_eq!(named("path2").unwrap().edges().len(), 1);
        assert_eq!(named("petersen").unwrap().edges().len(), 15);
        assert!(named("cycle2").is_none());
        assert!(named("nope").is_none());
    }

    #[test]
    fn samples_are_reproducible() {
        for i in 0..20 {
            let g = sample_graph(7, i, 3, 8);
            assert_eq!(g, sample_graph(7, i, 3, 8));
            assert!((3..=8).contains(&g.vertex_count()));
        }
        assert_ne!(sample_graph(7, 0, 3, 8), sample_graph(8, 0, 3, 8));
    }
}
