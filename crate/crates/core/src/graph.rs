//! Undirected bitset graphs and exact clique search.

use serde::{Deserialize, Serialize};

use crate::bits;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleGraph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        let words = bits::words_for(n);
        SimpleGraph {
            n,
            words,
            adj: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = SimpleGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn order(&self) -> usize {
        self.n
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "no loops");
        let w = self.words;
        bits::set(&mut self.adj[u * w..(u + 1) * w], v);
        bits::set(&mut self.adj[v * w..(v + 1) * w], u);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        bits::test(self.row(u), v)
    }

    pub fn degree(&self, v: usize) -> usize {
        bits::count(self.row(v))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        bits::to_list(self.row(v))
    }

    pub fn complement(&self) -> SimpleGraph {
        let mut g = SimpleGraph::new(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(i, &u)| vs[i + 1..].iter().all(|&v| u != v && self.has_edge(u, v)))
    }
}

/// The lexicographically least clique on `p` vertices, if one exists.
///
/// Exact backtracking over ascending vertex choices with common-neighbourhood
/// bitsets; a branch is cut when too few candidates remain.
pub fn turan_clique(g: &SimpleGraph, p: usize) -> Option<Vec<usize>> {
    if p == 0 {
        return Some(Vec::new());
    }
    let mut all = vec![0u64; g.words];
    for v in 0..g.n {
        bits::set(&mut all, v);
    }
    let mut clique = Vec::with_capacity(p);
    if grow(g, p, &all, &mut clique) {
        Some(clique)
    } else {
        None
    }
}

fn grow(g: &SimpleGraph, p: usize, cand: &[u64], clique: &mut Vec<usize>) -> bool {
    if clique.len() == p {
        return true;
    }
    let mut rest = cand.to_vec();
    for v in bits::to_list(cand) {
        if clique.len() + bits::count(&rest) < p {
            return false;
        }
        bits::clear(&mut rest, v);
        let mut next = rest.clone();
        bits::and_assign(&mut next, g.row(v));
        clique.push(v);
        if grow(g, p, &next, clique) {
            return true;
        }
        clique.pop();
    }
    false
}

/// A largest clique (lexicographically least among those of maximum size).
pub fn max_clique(g: &SimpleGraph) -> Vec<usize> {
    let mut best = Vec::new();
    for p in 1..=g.n {
        match turan_clique(g, p) {
            Some(c) => best = c,
            None => break,
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn complete_graph_has_every_clique() {
        let g = SimpleGraph::complete(5);
        assert_eq!(turan_clique(&g, 5), Some(vec![0, 1, 2, 3, 4]));
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn turan_graph_is_extremal() {
        // complete 3-partite graph on 9 vertices has no 4-clique
        let mut g = SimpleGraph::new(9);
        for u in 0..9 {
            for v in u + 1..9 {
                if u % 3 != v % 3 {
                    g.add_edge(u, v);
                }
            }
        }
        assert!(turan_clique(&g, 3).is_some());
        assert!(turan_clique(&g, 4).is_none());
        assert_eq!(max_clique(&g).len(), 3);
    }

    proptest! {
        #[test]
        fn matches_subset_scan(n in 1usize..=11, p in 1usize..=5, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut g = SimpleGraph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.9) {
                        g.add_edge(u, v);
                    }
                }
            }
            let brute = (0u32..1 << n)
                .filter(|m| m.count_ones() as usize == p)
                .map(|m| bits::mask_ones(m as u64).collect::<Vec<_>>())
                .filter(|vs| g.is_clique(vs))
                .min();
            prop_assert_eq!(turan_clique(&g, p), brute);
        }
    }
}
