//! Star decomposition of backward-edge graphs and recognition of nebula and
//! galaxy orderings.

use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::Result;
use crate::tournament::{BackwardEdgeGraph, Tournament, VertexOrdering};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StarKind {
    Singleton,
    LeftStar,
    RightStar,
    CentralStar,
    /// Two vertices joined by one backward edge; either end may serve as the
    /// center, and by convention the earlier one is reported.
    GeneralStar,
    NonStar,
}

/// One connected component of a backward-edge graph.
///
/// `vertices` and `positions` are listed in ordering order. For a `NonStar`
/// component `center` is the vertex of largest degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarComponent {
    pub kind: StarKind,
    pub center: usize,
    pub leaves: Vec<usize>,
    pub vertices: Vec<usize>,
    pub positions: Vec<usize>,
}

impl StarComponent {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Which family of orderings to look for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderingKind {
    Nebula,
    Left,
    Right,
    Central,
    Galaxy,
}

impl OrderingKind {
    pub const ALL: [OrderingKind; 5] = [
        OrderingKind::Nebula,
        OrderingKind::Left,
        OrderingKind::Right,
        OrderingKind::Central,
        OrderingKind::Galaxy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderingKind::Nebula => "nebula",
            OrderingKind::Left => "left",
            OrderingKind::Right => "right",
            OrderingKind::Central => "central",
            OrderingKind::Galaxy => "galaxy",
        }
    }
}

impl std::str::FromStr for OrderingKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        OrderingKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown ordering kind `{s}`"))
    }
}

/// Outcome of a recognition query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NebulaVerdict {
    pub kind: OrderingKind,
    pub ordering: Option<Vec<usize>>,
    pub components: Vec<StarComponent>,
}

pub fn backward_graph(t: &Tournament, theta: &VertexOrdering) -> BackwardEdgeGraph {
    t.backward_edges(theta)
}

/// Labels every component of `b`, listed by earliest position.
pub fn classify_components(b: &BackwardEdgeGraph, theta: &VertexOrdering) -> Vec<StarComponent> {
    let mut comps: Vec<StarComponent> = b
        .components()
        .into_iter()
        .map(|mut vs| {
            vs.sort_by_key(|&v| theta.position(v));
            classify_one(b, theta, vs)
        })
        .collect();
    comps.sort_by_key(|c| c.positions[0]);
    comps
}

fn classify_one(
    b: &BackwardEdgeGraph,
    theta: &VertexOrdering,
    vertices: Vec<usize>,
) -> StarComponent {
    let positions: Vec<usize> = vertices.iter().map(|&v| theta.position(v)).collect();
    let size = vertices.len();
    let degree_in = |v: usize| b.neighbors(v).len();
    let edges: usize = vertices.iter().map(|&v| degree_in(v)).sum::<usize>() / 2;
    let center = *vertices
        .iter()
        .max_by_key(|&&v| (degree_in(v), std::cmp::Reverse(theta.position(v))))
        .expect("nonempty component");
    let kind = if size == 1 {
        StarKind::Singleton
    } else if size == 2 {
        StarKind::GeneralStar
    } else if edges == size - 1 && degree_in(center) == size - 1 {
        if center == vertices[0] {
            StarKind::LeftStar
        } else if center == vertices[size - 1] {
            StarKind::RightStar
        } else {
            StarKind::CentralStar
        }
    } else {
        StarKind::NonStar
    };
    let center = if size == 2 { vertices[0] } else { center };
    let leaves = vertices.iter().copied().filter(|&v| v != center).collect();
    StarComponent {
        kind,
        center,
        leaves,
        vertices,
        positions,
    }
}

fn components_of(t: &Tournament, theta: &VertexOrdering) -> Vec<StarComponent> {
    classify_components(&t.backward_edges(theta), theta)
}

pub fn is_nebula_ordering(t: &Tournament, theta: &VertexOrdering) -> bool {
    components_of(t, theta)
        .iter()
        .all(|c| c.kind != StarKind::NonStar)
}

fn three_vertex_kind(t: &Tournament, theta: &VertexOrdering, kind: StarKind) -> bool {
    components_of(t, theta)
        .iter()
        .all(|c| c.kind == StarKind::Singleton || (c.kind == kind && c.len() == 3))
}

pub fn is_left_nebula_ordering(t: &Tournament, theta: &VertexOrdering) -> bool {
    three_vertex_kind(t, theta, StarKind::LeftStar)
}

pub fn is_right_nebula_ordering(t: &Tournament, theta: &VertexOrdering) -> bool {
    three_vertex_kind(t, theta, StarKind::RightStar)
}

pub fn is_central_nebula_ordering(t: &Tournament, theta: &VertexOrdering) -> bool {
    three_vertex_kind(t, theta, StarKind::CentralStar)
}

/// Components must be left stars, right stars, or singletons, and no star
/// center may sit strictly between two leaves of another star. A two-vertex
/// star may take either end as its center; it passes if some choice does.
pub fn is_galaxy_ordering(t: &Tournament, theta: &VertexOrdering) -> bool {
    galaxy_components_ok(&components_of(t, theta))
}

fn galaxy_components_ok(comps: &[StarComponent]) -> bool {
    if comps.iter().any(|c| {
        !matches!(
            c.kind,
            StarKind::Singleton | StarKind::LeftStar | StarKind::RightStar | StarKind::GeneralStar
        )
    }) {
        return false;
    }
    // Leaf spans of stars with at least two leaves, as open position intervals.
    let spans: Vec<(usize, usize, usize)> = comps
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() >= 3)
        .map(|(i, c)| {
            let leaf_pos = c
                .positions
                .iter()
                .zip(&c.vertices)
                .filter(|(_, &v)| v != c.center)
                .map(|(&p, _)| p);
            let lo = leaf_pos.clone().min().unwrap();
            let hi = leaf_pos.max().unwrap();
            (i, lo, hi)
        })
        .collect();
    let inside = |owner: usize, pos: usize| {
        spans
            .iter()
            .any(|&(i, lo, hi)| i != owner && lo < pos && pos < hi)
    };
    comps.iter().enumerate().all(|(i, c)| match c.kind {
        StarKind::Singleton => true,
        StarKind::GeneralStar => !inside(i, c.positions[0]) || !inside(i, c.positions[1]),
        _ => {
            let p = c.positions[c.vertices.iter().position(|&v| v == c.center).unwrap()];
            !inside(i, p)
        }
    })
}

pub fn satisfies(t: &Tournament, theta: &VertexOrdering, kind: OrderingKind) -> bool {
    match kind {
        OrderingKind::Nebula => is_nebula_ordering(t, theta),
        OrderingKind::Left => is_left_nebula_ordering(t, theta),
        OrderingKind::Right => is_right_nebula_ordering(t, theta),
        OrderingKind::Central => is_central_nebula_ordering(t, theta),
        OrderingKind::Galaxy => is_galaxy_ordering(t, theta),
    }
}

/// The lexicographically least ordering of the requested kind, or `None` if
/// no ordering qualifies. Exhaustive with prefix pruning; `n` is limited by
/// `NEBULAE_ORDERING_MAX_N`.
pub fn find_ordering(t: &Tournament, kind: OrderingKind) -> Result<Option<VertexOrdering>> {
    find_ordering_with_limit(t, kind, budget::limits().ordering_max_n)
}

/// [`find_ordering`] with an explicit size limit (at most 64).
pub fn find_ordering_with_limit(
    t: &Tournament,
    kind: OrderingKind,
    max_n: usize,
) -> Result<Option<VertexOrdering>> {
    budget::check("find_ordering", t.order(), max_n.min(64))?;
    let n = t.order();
    let mut s = OrderSearch {
        t,
        kind,
        order: Vec::with_capacity(n),
        pos: vec![usize::MAX; n],
        adj: vec![0; n],
        placed: 0,
    };
    Ok(if s.go() {
        Some(VertexOrdering::new(s.order).expect("search builds a permutation"))
    } else {
        None
    })
}

pub fn recognize(t: &Tournament, kind: OrderingKind) -> Result<NebulaVerdict> {
    let found = find_ordering(t, kind)?;
    let components = found
        .as_ref()
        .map(|theta| components_of(t, theta))
        .unwrap_or_default();
    Ok(NebulaVerdict {
        kind,
        ordering: found.map(|o| o.as_slice().to_vec()),
        components,
    })
}

struct OrderSearch<'a> {
    t: &'a Tournament,
    kind: OrderingKind,
    order: Vec<usize>,
    pos: Vec<usize>,
    /// Backward-edge adjacency restricted to placed vertices.
    adj: Vec<u64>,
    placed: u64,
}

impl OrderSearch<'_> {
    fn go(&mut self) -> bool {
        let n = self.t.order();
        if self.order.len() == n {
            let theta = VertexOrdering::new(self.order.clone()).expect("permutation");
            return satisfies(self.t, &theta, self.kind);
        }
        for v in 0..n {
            if self.placed >> v & 1 == 1 {
                continue;
            }
            let back = self.t.out_mask(v) & self.placed;
            self.pos[v] = self.order.len();
            self.order.push(v);
            self.placed |= 1 << v;
            self.adj[v] = back;
            for u in crate::bits::mask_ones(back) {
                self.adj[u] |= 1 << v;
            }
            if self.prefix_ok(v) && self.go() {
                return true;
            }
            for u in crate::bits::mask_ones(back) {
                self.adj[u] &= !(1 << v);
            }
            self.adj[v] = 0;
            self.placed &= !(1 << v);
            self.order.pop();
            self.pos[v] = usize::MAX;
        }
        false
    }

    fn component(&self, v: usize) -> u64 {
        let mut comp = 1u64 << v;
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0;
            for u in crate::bits::mask_ones(frontier) {
                next |= self.adj[u];
            }
            frontier = next & !comp;
            comp |= next;
        }
        comp
    }

    /// Star shape of a placed component: `Some(center)` for a star on at least
    /// three vertices, `Some(earliest)` for smaller ones, `None` if not a star.
    fn star_center(&self, comp: u64) -> Option<usize> {
        let size = comp.count_ones();
        let vs: Vec<usize> = crate::bits::mask_ones(comp).collect();
        let edges: u32 = vs.iter().map(|&u| self.adj[u].count_ones()).sum::<u32>() / 2;
        if edges != size - 1 {
            return None;
        }
        if size <= 2 {
            return vs.iter().copied().min_by_key(|&u| self.pos[u]);
        }
        vs.iter()
            .copied()
            .find(|&u| self.adj[u].count_ones() == size - 1)
    }

    fn prefix_ok(&self, v: usize) -> bool {
        let comp = self.component(v);
        let Some(center) = self.star_center(comp) else {
            return false;
        };
        let size = comp.count_ones();
        let first = crate::bits::mask_ones(comp)
            .min_by_key(|&u| self.pos[u])
            .unwrap();
        let last = crate::bits::mask_ones(comp)
            .max_by_key(|&u| self.pos[u])
            .unwrap();
        match self.kind {
            OrderingKind::Nebula => true,
            OrderingKind::Left => size < 3 || (size == 3 && center == first),
            OrderingKind::Right => size == 1 || (size == 3 && center == last),
            OrderingKind::Central => size < 3 || (size == 3 && center != first && center != last),
            OrderingKind::Galaxy => {
                if size >= 3 && center != first && center != last {
                    return false;
                }
                self.galaxy_spans_ok()
            }
        }
    }

    /// No determined center lies strictly inside another star's leaf span.
    fn galaxy_spans_ok(&self) -> bool {
        let mut seen = 0u64;
        let mut stars = Vec::new();
        for &u in &self.order {
            if seen >> u & 1 == 1 {
                continue;
            }
            let comp = self.component(u);
            seen |= comp;
            if comp.count_ones() >= 3 {
                let center = self.star_center(comp).expect("checked when formed");
                let leaves = crate::bits::mask_ones(comp).filter(|&w| w != center);
                let lo = leaves.clone().map(|w| self.pos[w]).min().unwrap();
                let hi = leaves.map(|w| self.pos[w]).max().unwrap();
                stars.push((self.pos[center], lo, hi));
            }
        }
        stars.iter().enumerate().all(|(i, &(c, _, _))| {
            stars
                .iter()
                .enumerate()
                .all(|(j, &(_, lo, hi))| i == j || !(lo < c && c < hi))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use proptest::prelude::*;

    fn one_based(c: &StarComponent) -> Vec<usize> {
        let mut v: Vec<usize> = c.vertices.iter().map(|v| v + 1).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn left_example_components() {
        let h = examples::left_example();
        let id = VertexOrdering::identity(12);
        let comps = classify_components(&backward_graph(&h, &id), &id);
        let stars: Vec<(Vec<usize>, StarKind, usize)> = comps
            .iter()
            .filter(|c| c.kind != StarKind::Singleton)
            .map(|c| (one_based(c), c.kind, c.center + 1))
            .collect();
        assert_eq!(
            stars,
            vec![
                (vec![1, 5, 9], StarKind::LeftStar, 1),
                (vec![2, 4], StarKind::GeneralStar, 2),
                (vec![3, 10], StarKind::GeneralStar, 3),
                (vec![6, 8, 11], StarKind::LeftStar, 6),
                (vec![7, 12], StarKind::GeneralStar, 7),
            ]
        );
        assert!(is_nebula_ordering(&h, &id));
        assert!(!is_left_nebula_ordering(&h, &id));
    }

    #[test]
    fn central_example_components() {
        let h = examples::central_example();
        let id = VertexOrdering::identity(12);
        let b = backward_graph(&h, &id);
        assert_eq!(b.edge_count(), 8);
        let comps = classify_components(&b, &id);
        let got: Vec<(Vec<usize>, usize)> = comps
            .iter()
            .map(|c| {
                assert_eq!(c.kind, StarKind::CentralStar);
                (one_based(c), c.center + 1)
            })
            .collect();
        assert_eq!(
            got,
            vec![
                (vec![1, 4, 8], 4),
                (vec![2, 6, 11], 6),
                (vec![3, 5, 9], 5),
                (vec![7, 10, 12], 10),
            ]
        );
        assert!(is_central_nebula_ordering(&h, &id));
    }

    #[test]
    fn complement_of_left_example_under_reversal() {
        let h = examples::left_example().complement();
        let rev = VertexOrdering::identity(12).reversed();
        let comps = components_of(&h, &rev);
        let right3 = comps
            .iter()
            .filter(|c| c.kind == StarKind::RightStar && c.len() == 3)
            .count();
        let two = comps
            .iter()
            .filter(|c| c.kind == StarKind::GeneralStar)
            .count();
        assert_eq!((right3, two), (2, 3));
    }

    #[test]
    fn triangle_and_path() {
        let c3 = Tournament::cyclic_triangle();
        let id = VertexOrdering::identity(3);
        assert_eq!(backward_graph(&c3, &id).edges(), &[(2, 0)]);
        assert!(is_nebula_ordering(&c3, &id));

        let id4 = VertexOrdering::identity(4);
        let p = Tournament::from_backward_edges(4, &id4, &[(2, 0), (3, 1), (3, 2)]).unwrap();
        let comps = components_of(&p, &id4);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].kind, StarKind::NonStar);
        assert!(!is_nebula_ordering(&p, &id4));
    }

    #[test]
    fn empty_backward_graph_is_all_singletons() {
        let t = Tournament::transitive(5);
        let id = VertexOrdering::identity(5);
        assert!(components_of(&t, &id)
            .iter()
            .all(|c| c.kind == StarKind::Singleton));
        assert!(is_galaxy_ordering(&t, &id));
    }

    #[test]
    fn galaxy_rule() {
        let id3 = VertexOrdering::identity(3);
        let left = Tournament::from_backward_edges(3, &id3, &[(1, 0), (2, 0)]).unwrap();
        assert!(is_galaxy_ordering(&left, &id3));

        // Left star {0, 2, 5} with leaves at 2 and 5; left star {3, 4, 6}
        // has its center 3 strictly between them.
        let id6 = VertexOrdering::identity(7);
        let bad =
            Tournament::from_backward_edges(7, &id6, &[(2, 0), (5, 0), (4, 3), (6, 3)]).unwrap();
        assert!(is_nebula_ordering(&bad, &id6));
        assert!(!is_galaxy_ordering(&bad, &id6));

        // Moving the second star after the first span is fine.
        let ok =
            Tournament::from_backward_edges(7, &id6, &[(1, 0), (2, 0), (4, 3), (6, 3)]).unwrap();
        assert!(is_galaxy_ordering(&ok, &id6));
    }

    #[test]
    fn two_vertex_star_may_pick_its_center() {
        // Left star {0, 1, 4}; the pair {2, 5} can use 5 as center.
        let id = VertexOrdering::identity(6);
        let t = Tournament::from_backward_edges(6, &id, &[(1, 0), (4, 0), (5, 2)]).unwrap();
        assert!(is_galaxy_ordering(&t, &id));
        // The pair {2, 3} has both ends inside the span (1, 4).
        let t = Tournament::from_backward_edges(6, &id, &[(1, 0), (4, 0), (3, 2)]).unwrap();
        assert!(!is_galaxy_ordering(&t, &id));
    }

    #[test]
    fn search_examples() {
        let c3 = Tournament::cyclic_triangle();
        assert!(find_ordering(&c3, OrderingKind::Nebula).unwrap().is_some());
        let t = Tournament::transitive(6);
        let theta = find_ordering(&t, OrderingKind::Nebula).unwrap().unwrap();
        assert_eq!(theta, VertexOrdering::identity(6));

        // Small central star with two extra vertices, one before and one after.
        let id = VertexOrdering::identity(5);
        let t = Tournament::from_backward_edges(5, &id, &[(2, 1), (3, 2)]).unwrap();
        let relabeled = t.relabel(&[3, 0, 4, 1, 2]).unwrap();
        let theta = find_ordering(&relabeled, OrderingKind::Central)
            .unwrap()
            .unwrap();
        assert!(is_central_nebula_ordering(&relabeled, &theta));
    }

    #[test]
    fn search_is_budgeted() {
        let t = Tournament::transitive(14);
        assert!(find_ordering(&t, OrderingKind::Nebula).is_err());
    }

    fn all_orderings(n: usize) -> Vec<VertexOrdering> {
        fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<VertexOrdering>) {
            if prefix.len() == n {
                out.push(VertexOrdering::new(prefix.clone()).unwrap());
                return;
            }
            for v in 0..n {
                if !prefix.contains(&v) {
                    prefix.push(v);
                    rec(prefix, n, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), n, &mut out);
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn search_matches_full_scan(n in 1usize..=6, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let t = Tournament::from_fn(n, |_, _| rng.gen_bool(0.8));
            let orderings = all_orderings(n);
            for kind in OrderingKind::ALL {
                let expected = orderings.iter().find(|o| satisfies(&t, o, kind)).cloned();
                prop_assert_eq!(find_ordering(&t, kind).unwrap(), expected, "{:?}", kind);
            }
        }

        #[test]
        fn galaxy_orderings_are_nebula_orderings(n in 1usize..=8, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng, seq::SliceRandom};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let t = Tournament::from_fn(n, |_, _| rng.gen_bool(0.85));
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let theta = VertexOrdering::new(order).unwrap();
            if is_galaxy_ordering(&t, &theta) {
                prop_assert!(is_nebula_ordering(&t, &theta));
            }
            for kind in [OrderingKind::Left, OrderingKind::Right, OrderingKind::Central] {
                if satisfies(&t, &theta, kind) {
                    prop_assert!(is_nebula_ordering(&t, &theta));
                }
            }
        }

        #[test]
        fn components_partition_and_survive_relabeling(n in 1usize..=10, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng, seq::SliceRandom};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let t = Tournament::from_fn(n, |_, _| rng.gen_bool(0.8));
            let theta = VertexOrdering::identity(n);
            let comps = components_of(&t, &theta);
            let mut all: Vec<usize> = comps.iter().flat_map(|c| c.vertices.clone()).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());

            // Relabel by perm and conjugate the ordering: kinds are unchanged.
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let r = t.relabel(&perm).unwrap();
            let mut inverse = vec![0; n];
            for (i, &p) in perm.iter().enumerate() {
                inverse[p] = i;
            }
            let conj = VertexOrdering::new((0..n).map(|i| inverse[i]).collect()).unwrap();
            let kinds = |cs: &[StarComponent]| cs.iter().map(|c| (c.kind, c.positions.clone())).collect::<Vec<_>>();
            prop_assert_eq!(kinds(&comps), kinds(&components_of(&r, &conj)));
        }
    }
}
