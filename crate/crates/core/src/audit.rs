//! Plain re-derivations used to validate command output. Everything here
//! works from edge queries alone and shares no code with the routines whose
//! answers it checks.

use num_rational::Ratio;

use crate::stars::OrderingKind;
use crate::tournament::Tournament;

/// `(later, earlier)` pairs whose edge points backward under `order`.
pub fn backward_pairs(t: &Tournament, order: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (pj, &j) in order.iter().enumerate() {
        for &i in &order[..pj] {
            if t.beats(j, i) {
                out.push((j, i));
            }
        }
    }
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the graph on `0..n` with the given edges, each
/// sorted, listed by smallest member.
pub fn components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let r = find(&mut parent, v);
        groups[r].push(v);
    }
    groups.retain(|g| !g.is_empty());
    groups.sort();
    groups
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Single,
    Pair,
    Left,
    Right,
    Central,
    Other,
}

/// Shape of one component; `pos[v]` is the position of `v`.
pub fn shape(comp: &[usize], edges: &[(usize, usize)], pos: &[usize]) -> (Shape, usize) {
    match comp.len() {
        1 => return (Shape::Single, comp[0]),
        2 => return (Shape::Pair, comp[0]),
        _ => {}
    }
    let inside: Vec<&(usize, usize)> = edges.iter().filter(|(a, _)| comp.contains(a)).collect();
    let degree = |v: usize| inside.iter().filter(|(a, b)| *a == v || *b == v).count();
    let Some(&center) = comp.iter().find(|&&v| degree(v) == comp.len() - 1) else {
        return (Shape::Other, comp[0]);
    };
    if inside.len() != comp.len() - 1 {
        return (Shape::Other, center);
    }
    let cp = pos[center];
    let s = if comp.iter().all(|&v| pos[v] >= cp) {
        Shape::Left
    } else if comp.iter().all(|&v| pos[v] <= cp) {
        Shape::Right
    } else {
        Shape::Central
    };
    (s, center)
}

/// Does `order` witness membership in `kind`?
pub fn ordering_ok(t: &Tournament, order: &[usize], kind: OrderingKind) -> bool {
    let n = t.order();
    let mut pos = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    let edges = backward_pairs(t, order);
    let comps = components(n, &edges);
    let shapes: Vec<(Shape, usize)> = comps.iter().map(|c| shape(c, &edges, &pos)).collect();
    let three = |want: Shape| {
        comps
            .iter()
            .zip(&shapes)
            .all(|(c, s)| s.0 == Shape::Single || (s.0 == want && c.len() == 3))
    };
    match kind {
        OrderingKind::Nebula => shapes.iter().all(|s| s.0 != Shape::Other),
        OrderingKind::Left => three(Shape::Left),
        OrderingKind::Right => three(Shape::Right),
        OrderingKind::Central => three(Shape::Central),
        OrderingKind::Galaxy => {
            if shapes
                .iter()
                .any(|s| matches!(s.0, Shape::Central | Shape::Other))
            {
                return false;
            }
            let spans: Vec<(usize, usize, usize)> = comps
                .iter()
                .zip(&shapes)
                .enumerate()
                .filter(|(_, (c, _))| c.len() >= 3)
                .map(|(i, (c, s))| {
                    let leaves = c.iter().filter(|&&v| v != s.1).map(|&v| pos[v]);
                    (i, leaves.clone().min().unwrap(), leaves.max().unwrap())
                })
                .collect();
            let covered = |owner: usize, p: usize| {
                spans
                    .iter()
                    .any(|&(i, lo, hi)| i != owner && lo < p && p < hi)
            };
            comps
                .iter()
                .zip(&shapes)
                .enumerate()
                .all(|(i, (c, s))| match s.0 {
                    Shape::Single => true,
                    Shape::Pair => !covered(i, pos[c[0]]) || !covered(i, pos[c[1]]),
                    _ => !covered(i, pos[s.1]),
                })
        }
    }
}

/// Some ordering of `kind`, by trying every permutation.
pub fn ordering_exists(t: &Tournament, kind: OrderingKind) -> bool {
    fn go(t: &Tournament, kind: OrderingKind, order: &mut Vec<usize>, used: &mut [bool]) -> bool {
        if order.len() == used.len() {
            return ordering_ok(t, order, kind);
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                order.push(v);
                let hit = go(t, kind, order, used);
                order.pop();
                used[v] = false;
                if hit {
                    return true;
                }
            }
        }
        false
    }
    let n = t.order();
    go(t, kind, &mut Vec::with_capacity(n), &mut vec![false; n])
}

/// A transitive set has pairwise distinct inner scores.
pub fn is_transitive(t: &Tournament, vs: &[usize]) -> bool {
    let mut scores: Vec<usize> = vs
        .iter()
        .map(|&u| vs.iter().filter(|&&v| v != u && t.beats(u, v)).count())
        .collect();
    scores.sort_unstable();
    scores.iter().enumerate().all(|(i, &s)| i == s)
}

/// Largest transitive subset size by scanning all subsets (`n <= 20`).
pub fn max_transitive(t: &Tournament) -> usize {
    let n = t.order();
    assert!(n <= 20);
    let mut best = 0;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if is_transitive(t, &vs) {
            best = size;
        }
    }
    best
}

/// A nontrivial homogeneous set, by scanning all subsets (`n <= 20`).
pub fn nontrivial_module(t: &Tournament) -> Option<Vec<usize>> {
    let n = t.order();
    assert!(n <= 20);
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size < 2 || size >= n {
            continue;
        }
        let inside = |v: usize| mask >> v & 1 == 1;
        let homogeneous = (0..n).filter(|&x| !inside(x)).all(|x| {
            let mut members = (0..n).filter(|&v| inside(v));
            let first = t.beats(x, members.next().unwrap());
            members.all(|v| t.beats(x, v) == first)
        });
        if homogeneous {
            return Some((0..n).filter(|&v| inside(v)).collect());
        }
    }
    None
}

/// Is `map` an injective copy of `h` inside `t`?
pub fn embeds(h: &Tournament, t: &Tournament, map: &[usize]) -> bool {
    if map.len() != h.order() || map.iter().any(|&x| x >= t.order()) {
        return false;
    }
    for a in 0..map.len() {
        for b in 0..map.len() {
            if a != b && (map[a] == map[b] || h.beats(a, b) != t.beats(map[a], map[b])) {
                return false;
            }
        }
    }
    true
}

pub fn complete(t: &Tournament, from: &[usize], to: &[usize]) -> bool {
    !from.is_empty()
        && !to.is_empty()
        && from
            .iter()
            .all(|&u| to.iter().all(|&v| u != v && t.beats(u, v)))
}

/// Least `lambda` for which `parts` form a strong structure: the largest
/// share of backward edges between two parts, or from one vertex to a later
/// part, or from an earlier part to one vertex.
pub fn strong_lambda(t: &Tournament, parts: &[Vec<usize>]) -> Ratio<i64> {
    let mut worst = Ratio::from_integer(0);
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let (a, b) = (&parts[i], &parts[j]);
            let back = |u: usize, v: usize| t.beats(v, u) as i64;
            let total: i64 = a
                .iter()
                .map(|&u| b.iter().map(|&v| back(u, v)).sum::<i64>())
                .sum();
            worst = worst.max(Ratio::new(total, (a.len() * b.len()) as i64));
            for &u in a {
                let r: i64 = b.iter().map(|&v| back(u, v)).sum();
                worst = worst.max(Ratio::new(r, b.len() as i64));
            }
            for &v in b {
                let r: i64 = a.iter().map(|&u| back(u, v)).sum();
                worst = worst.max(Ratio::new(r, a.len() as i64));
            }
        }
    }
    worst
}

/// Ordinary least squares of `y` on `x`: slope and intercept.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let m = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let d = m * sxx - sx * sx;
    if d.abs() < 1e-12 {
        return None;
    }
    let slope = (m * sxy - sx * sy) / d;
    Some((slope, (sy - slope * sx) / m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::stars;
    use crate::tournament::VertexOrdering;

    #[test]
    fn left_example_components() {
        let t = examples::left_example();
        let order: Vec<usize> = (0..12).collect();
        let e = backward_pairs(&t, &order);
        assert_eq!(e.len(), 7);
        let c = components(12, &e);
        assert!(c.contains(&vec![0, 4, 8]));
        assert!(c.contains(&vec![1, 3]));
        assert!(ordering_ok(&t, &order, OrderingKind::Nebula));
        assert!(!ordering_ok(&t, &order, OrderingKind::Left));
    }

    #[test]
    fn agrees_with_the_library_on_small_tournaments() {
        for n in 1..=5 {
            for t in crate::canon::enumerate_tournaments(n).unwrap() {
                for kind in OrderingKind::ALL {
                    let lib = stars::find_ordering(&t, kind).unwrap().is_some();
                    assert_eq!(lib, ordering_exists(&t, kind), "{t:?} {kind:?}");
                }
                assert_eq!(nontrivial_module(&t).is_none(), crate::is_prime(&t));
                assert_eq!(max_transitive(&t), crate::transitive_number(&t).unwrap());
            }
        }
        let c3 = Tournament::cyclic_triangle();
        assert!(ordering_ok(
            &c3,
            VertexOrdering::identity(3).as_slice(),
            OrderingKind::Nebula
        ));
        assert!(!ordering_ok(
            &c3,
            VertexOrdering::identity(3).as_slice(),
            OrderingKind::Left
        ));
    }

    #[test]
    fn strong_lambda_of_forward_blocks_is_zero() {
        let t = Tournament::transitive(6);
        assert_eq!(
            strong_lambda(&t, &[vec![0, 1], vec![2, 3], vec![4, 5]]),
            Ratio::from_integer(0)
        );
        assert_eq!(
            strong_lambda(&t, &[vec![2, 3], vec![0, 1]]),
            Ratio::from_integer(1)
        );
    }

    #[test]
    fn fits_a_line() {
        let (s, i) = least_squares(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!((s - 2.0).abs() < 1e-12 && (i - 1.0).abs() < 1e-12);
    }
}
