//! Bit-packed tournaments, vertex orderings, and backward-edge graphs.
//!
//! Vertices are `0..n`. Every vertex owns an out-row and an in-row, each a
//! `ceil(n / 64)`-word bitset, so tournaments on at most 64 vertices get a
//! single-word fast path through [`Tournament::out_mask`].

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: usize,
    words: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Tournament(n = {})", self.n)?;
        for u in 0..self.n {
            let row: String = (0..self.n)
                .map(|v| if self.beats(u, v) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

impl Tournament {
    fn empty(n: usize) -> Self {
        let words = bits::words_for(n);
        Tournament {
            n,
            words,
            out: vec![0; n * words],
            inn: vec![0; n * words],
        }
    }

    fn orient(&mut self, u: usize, v: usize) {
        let w = self.words;
        bits::set(&mut self.out[u * w..(u + 1) * w], v);
        bits::clear(&mut self.out[v * w..(v + 1) * w], u);
        bits::set(&mut self.inn[v * w..(v + 1) * w], u);
        bits::clear(&mut self.inn[u * w..(u + 1) * w], v);
    }

    /// Builds a tournament from a predicate queried once per pair `u < v`:
    /// `true` means `u -> v`.
    pub fn from_fn(n: usize, mut forward: impl FnMut(usize, usize) -> bool) -> Self {
        let mut t = Tournament::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if forward(u, v) {
                    t.orient(u, v);
                } else {
                    t.orient(v, u);
                }
            }
        }
        t
    }

    /// The transitive tournament `T_n` with `u -> v` whenever `u < v`.
    pub fn transitive(n: usize) -> Self {
        Tournament::from_fn(n, |_, _| true)
    }

    /// `0 -> 1 -> 2 -> 0`.
    pub fn cyclic_triangle() -> Self {
        Tournament::from_fn(3, |u, v| !(u == 0 && v == 2))
    }

    /// Parses a 0/1 adjacency matrix; `matrix[u][v]` means `u -> v`.
    pub fn from_matrix(matrix: &[Vec<bool>]) -> Result<Self> {
        let n = matrix.len();
        for (u, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "row {u} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row[u] {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
        }
        for (u, row) in matrix.iter().enumerate() {
            for v in u + 1..n {
                if row[v] == matrix[v][u] {
                    return Err(Error::invalid(format!(
                        "pair ({u}, {v}) must have exactly one orientation"
                    )));
                }
            }
        }
        Ok(Tournament::from_fn(n, |u, v| matrix[u][v]))
    }

    /// Builds the tournament whose backward edges under `ordering` are exactly
    /// `back_edges`; every other pair points forward.
    ///
    /// Each pair `(later, earlier)` is the directed edge `later -> earlier`.
    pub fn from_backward_edges(
        n: usize,
        ordering: &VertexOrdering,
        back_edges: &[(usize, usize)],
    ) -> Result<Self> {
        if ordering.len() != n {
            return Err(Error::invalid(format!(
                "ordering has {} vertices, expected {n}",
                ordering.len()
            )));
        }
        let mut t = Tournament::from_fn(n, |u, v| ordering.position(u) < ordering.position(v));
        let mut seen = std::collections::HashSet::new();
        for &(later, earlier) in back_edges {
            for v in [later, earlier] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if ordering.position(earlier) >= ordering.position(later) {
                return Err(Error::invalid(format!(
                    "edge ({later}, {earlier}) is not backward under the ordering"
                )));
            }
            if !seen.insert((later.min(earlier), later.max(earlier))) {
                return Err(Error::invalid(format!(
                    "duplicate backward pair {{{later}, {earlier}}}"
                )));
            }
            t.orient(later, earlier);
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub(crate) fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn beats(&self, u: usize, v: usize) -> bool {
        bits::test(self.out_row(u), v)
    }

    #[inline]
    pub(crate) fn out_row(&self, v: usize) -> &[u64] {
        &self.out[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub(crate) fn in_row(&self, v: usize) -> &[u64] {
        &self.inn[v * self.words..(v + 1) * self.words]
    }

    /// Out-neighbourhood of `v` as a single word. Only valid for `n <= 64`.
    #[inline]
    pub fn out_mask(&self, v: usize) -> u64 {
        debug_assert!(self.n <= 64);
        self.out[v * self.words]
    }

    #[inline]
    pub fn in_mask(&self, v: usize) -> u64 {
        debug_assert!(self.n <= 64);
        self.inn[v * self.words]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        bits::count(self.out_row(v))
    }

    pub fn in_degree(&self, v: usize) -> usize {
        bits::count(self.in_row(v))
    }

    pub fn out_neighbors(&self, v: usize) -> Vec<usize> {
        bits::to_list(self.out_row(v))
    }

    pub fn in_neighbors(&self, v: usize) -> Vec<usize> {
        bits::to_list(self.in_row(v))
    }

    /// Out-degrees of all vertices.
    pub fn scores(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.out_degree(v)).collect()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.out_degree(v)).sum()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| bits::ones(self.out_row(u)).map(move |v| (u, v)))
            .collect()
    }

    /// Reverses every edge.
    pub fn complement(&self) -> Tournament {
        Tournament {
            n: self.n,
            words: self.words,
            out: self.inn.clone(),
            inn: self.out.clone(),
        }
    }

    /// The subtournament induced by `vertices`; vertex `i` of the result is
    /// `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Result<Tournament> {
        if vertices.is_empty() {
            return Err(Error::invalid("induced subtournament of an empty set"));
        }
        check_distinct(self.n, vertices)?;
        Ok(Tournament::from_fn(vertices.len(), |a, b| {
            self.beats(vertices[a], vertices[b])
        }))
    }

    /// Relabels so that vertex `i` of the result is vertex `perm[i]` here.
    pub fn relabel(&self, perm: &[usize]) -> Result<Tournament> {
        if perm.len() != self.n {
            return Err(Error::invalid("relabeling must be a permutation"));
        }
        self.induced(perm)
    }

    /// A tournament is transitive iff its score sequence is `0, 1, ..., n-1`.
    pub fn is_transitive(&self) -> bool {
        let mut seen = vec![false; self.n];
        for v in 0..self.n {
            let s = self.out_degree(v);
            if seen[s] {
                return false;
            }
            seen[s] = true;
        }
        true
    }

    /// Is the subtournament on `vertices` transitive?
    pub fn is_transitive_set(&self, vertices: &[usize]) -> bool {
        let set = bits::from_list(self.words, vertices);
        let mut seen = vec![false; vertices.len()];
        for &v in vertices {
            let s = bits::count_and(self.out_row(v), &set);
            if s >= seen.len() || seen[s] {
                return false;
            }
            seen[s] = true;
        }
        true
    }

    /// Sorts a transitive vertex set from source to sink.
    pub fn transitive_order(&self, vertices: &[usize]) -> Option<Vec<usize>> {
        if !self.is_transitive_set(vertices) {
            return None;
        }
        let set = bits::from_list(self.words, vertices);
        let mut v: Vec<usize> = vertices.to_vec();
        v.sort_by_key(|&x| std::cmp::Reverse(bits::count_and(self.out_row(x), &set)));
        Some(v)
    }

    /// Is every vertex of `from` adjacent to every vertex of `to`?
    pub fn is_complete_to(&self, from: &[usize], to: &[usize]) -> bool {
        let target = bits::from_list(self.words, to);
        from.iter()
            .all(|&a| bits::is_subset(&target, self.out_row(a)))
    }

    /// Number of edges directed from `a` into `b`.
    pub fn edges_between(&self, a: &[usize], b: &[usize]) -> usize {
        let target = bits::from_list(self.words, b);
        a.iter()
            .map(|&x| bits::count_and(self.out_row(x), &target))
            .sum()
    }

    /// The graph of backward edges under `ordering`.
    pub fn backward_edges(&self, ordering: &VertexOrdering) -> BackwardEdgeGraph {
        let mut edges = Vec::new();
        for later_pos in 0..self.n {
            let later = ordering.at(later_pos);
            for earlier_pos in 0..later_pos {
                let earlier = ordering.at(earlier_pos);
                if self.beats(later, earlier) {
                    edges.push((later, earlier));
                }
            }
        }
        BackwardEdgeGraph::new(self.n, edges)
    }
}

pub(crate) fn check_distinct(n: usize, vertices: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &v in vertices {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if seen[v] {
            return Err(Error::invalid(format!("vertex {v} listed twice")));
        }
        seen[v] = true;
    }
    Ok(())
}

/// `d(A, B) = e(A, B) / (|A| |B|)` for disjoint nonempty `A`, `B`.
pub fn density(t: &Tournament, a: &[usize], b: &[usize]) -> Result<Ratio<i64>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("density needs two nonempty sets"));
    }
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    check_distinct(t.order(), &both)?;
    Ok(Ratio::new(
        t.edges_between(a, b) as i64,
        (a.len() * b.len()) as i64,
    ))
}

/// A permutation of the vertex set: `at(i)` is the vertex in position `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexOrdering {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl VertexOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if position[v] != usize::MAX {
                return Err(Error::invalid(format!(
                    "vertex {v} appears twice in ordering"
                )));
            }
            position[v] = i;
        }
        Ok(VertexOrdering { order, position })
    }

    pub fn identity(n: usize) -> Self {
        VertexOrdering {
            order: (0..n).collect(),
            position: (0..n).collect(),
        }
    }

    pub fn reversed(&self) -> Self {
        let order: Vec<usize> = self.order.iter().rev().copied().collect();
        let n = order.len();
        let position = self.position.iter().map(|&p| n - 1 - p).collect();
        VertexOrdering { order, position }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.order[i]
    }

    #[inline]
    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }
}

/// Undirected graph of backward edges under some ordering.
///
/// `edges` keeps the tournament orientation `(later, earlier)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackwardEdgeGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl BackwardEdgeGraph {
    pub(crate) fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        BackwardEdgeGraph { n, edges, adj }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Connected components, each sorted ascending, listed by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            let mut members = Vec::new();
            comp[s] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

impl Serialize for Tournament {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<String> = (0..self.order())
            .map(|u| {
                (0..self.order())
                    .map(|v| if self.beats(u, v) { '1' } else { '0' })
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tournament {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<String> = Vec::deserialize(d)?;
        let matrix: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.chars().map(|c| c == '1').collect())
            .collect();
        Tournament::from_matrix(&matrix).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use proptest::prelude::*;

    #[test]
    fn single_backward_edge_closes_a_triangle() {
        let t =
            Tournament::from_backward_edges(3, &VertexOrdering::identity(3), &[(2, 0)]).unwrap();
        assert!(t.beats(0, 1) && t.beats(1, 2) && t.beats(2, 0));
        assert_eq!(t, Tournament::cyclic_triangle());
    }

    #[test]
    fn no_backward_edges_is_transitive() {
        let t = Tournament::from_backward_edges(4, &VertexOrdering::identity(4), &[]).unwrap();
        assert!(t.is_transitive());
        assert_eq!(t.edge_count(), 6);
    }

    #[test]
    fn rejects_forward_and_out_of_range_pairs() {
        let id = VertexOrdering::identity(3);
        assert!(matches!(
            Tournament::from_backward_edges(3, &id, &[(0, 2)]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            Tournament::from_backward_edges(3, &id, &[(5, 0)]),
            Err(Error::VertexOutOfRange { .. })
        ));
        assert!(Tournament::from_backward_edges(3, &id, &[(2, 0), (2, 0)]).is_err());
    }

    #[test]
    fn complement_of_triangle_and_transitive() {
        let c3 = Tournament::cyclic_triangle();
        assert!(!c3.complement().is_transitive());
        assert!(Tournament::transitive(5).complement().is_transitive());
    }

    #[test]
    fn induced_examples() {
        let t = Tournament::transitive(5);
        assert_eq!(t.induced(&[0, 1, 2, 3, 4]).unwrap(), t);
        let c3 = Tournament::cyclic_triangle();
        let e = c3.induced(&[0, 1]).unwrap();
        assert!(e.beats(0, 1));
        assert!(c3.induced(&[]).is_err());
        assert!(c3.induced(&[0, 7]).is_err());

        // {1, 5, 9} of the left example: 5 -> 1, 9 -> 1, 5 -> 9.
        let h = examples::left_example();
        let s = h.induced(&[0, 4, 8]).unwrap();
        assert!(s.beats(1, 0) && s.beats(2, 0) && s.beats(1, 2));
    }

    #[test]
    fn left_example_has_a_triangle() {
        let h = examples::left_example();
        // 1 -> 4 -> 5 -> 1 in one-based labels
        assert!(h.beats(0, 3) && h.beats(3, 4) && h.beats(4, 0));
        assert!(!h.is_transitive());
    }

    #[test]
    fn density_examples() {
        let t = Tournament::transitive(4);
        assert_eq!(
            density(&t, &[0, 1], &[2, 3]).unwrap(),
            Ratio::from_integer(1)
        );
        assert_eq!(
            density(&t, &[2, 3], &[0, 1]).unwrap(),
            Ratio::from_integer(0)
        );
        let c3 = Tournament::cyclic_triangle();
        assert_eq!(density(&c3, &[0], &[1, 2]).unwrap(), Ratio::new(1, 2));
        assert!(density(&c3, &[0], &[0, 1]).is_err());
        assert!(density(&c3, &[], &[1]).is_err());
    }

    #[test]
    fn wide_tournaments_use_multiple_words() {
        let t = Tournament::from_fn(150, |u, v| (u + v) % 3 != 0);
        assert_eq!(t.edge_count(), 150 * 149 / 2);
        for u in 0..150 {
            assert_eq!(t.out_degree(u) + t.in_degree(u), 149);
        }
        assert_eq!(t.complement().complement(), t);
    }

    fn arb_tournament(max_n: usize) -> impl Strategy<Value = Tournament> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let mut it = bits.into_iter();
                Tournament::from_fn(n, |_, _| it.next().unwrap())
            })
        })
    }

    proptest! {
        #[test]
        fn antisymmetric_and_complete(t in arb_tournament(20)) {
            let n = t.order();
            prop_assert_eq!(t.edge_count(), n * (n - 1) / 2);
            for u in 0..n {
                prop_assert!(!t.beats(u, u));
                for v in 0..n {
                    if u != v {
                        prop_assert!(t.beats(u, v) ^ t.beats(v, u));
                    }
                }
            }
        }

        #[test]
        fn complement_is_an_involution(t in arb_tournament(20)) {
            prop_assert_eq!(t.complement().complement(), t);
        }

        #[test]
        fn backward_edges_round_trip(t in arb_tournament(12), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = (0..t.order()).collect();
            order.shuffle(&mut rng);
            let theta = VertexOrdering::new(order).unwrap();
            let b = t.backward_edges(&theta);
            let rebuilt = Tournament::from_backward_edges(t.order(), &theta, b.edges()).unwrap();
            prop_assert_eq!(&rebuilt, &t);
            prop_assert_eq!(rebuilt.backward_edges(&theta), b);
        }

        #[test]
        fn densities_sum_to_one(t in arb_tournament(12), split in 1usize..11) {
            let n = t.order();
            prop_assume!(n >= 2);
            let k = split.min(n - 1);
            let a: Vec<usize> = (0..k).collect();
            let b: Vec<usize> = (k..n).collect();
            let sum = density(&t, &a, &b).unwrap() + density(&t, &b, &a).unwrap();
            prop_assert_eq!(sum, Ratio::from_integer(1));
        }
    }
}
