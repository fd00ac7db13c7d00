//! Dense ordered set systems inside a tournament, triples of sets, and the
//! extraction of product tournaments from normal structures.
//!
//! Parts of a structure are numbered from 0. A triple is a structure with three
//! parts; the triple kinds accepted by the witness searches are
//!
//! | kind    | `(i, j)` pairs     | vertex pattern on `(v0, v1, v2)`        |
//! |---------|--------------------|-----------------------------------------|
//! | left    | `(1, 0)`, `(2, 0)` | `v1 -> v0`, `v2 -> v0`, `v1 -> v2`      |
//! | right   | `(1, 2)`, `(0, 2)` | `v2 -> v0`, `v2 -> v1`, `v0 -> v1`      |
//! | central | `(0, 1)`, `(2, 1)` | `v1 -> v0`, `v2 -> v1`, `v0 -> v2`      |

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::containment::Embedding;
use crate::error::{Error, Result};
use crate::graph::{turan_clique, SimpleGraph};
use crate::product::{product, Placement, StarShape};
use crate::tournament::{check_distinct, density, Tournament};
use crate::transitive::largest_transitive;

pub type Rational = Ratio<i64>;

/// `from` is complete to `to`. `from_part` and `to_part` name the parts of the
/// surrounding structure the two sides were drawn from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletePair {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub from_part: usize,
    pub to_part: usize,
}

impl CompletePair {
    /// Nonempty, disjoint, and every vertex of `from` beats every vertex of
    /// `to`.
    pub fn validate(&self, t: &Tournament) -> bool {
        if self.from.is_empty() || self.to.is_empty() {
            return false;
        }
        let mut all = self.from.clone();
        all.extend_from_slice(&self.to);
        check_distinct(t.order(), &all).is_ok() && t.is_complete_to(&self.from, &self.to)
    }

    pub fn min_side(&self) -> usize {
        self.from.len().min(self.to.len())
    }
}

fn check_parts(t: &Tournament, parts: &[Vec<usize>]) -> Result<()> {
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::invalid("structure parts must be nonempty"));
    }
    let all: Vec<usize> = parts.iter().flatten().copied().collect();
    check_distinct(t.order(), &all)
}

/// One failed condition of a structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    /// `|S_part| < c n`.
    PartSize { part: usize, size: usize },
    /// A part marked transitive is not.
    NotTransitive { part: usize },
    /// A transitive part is smaller than `c tr(T)`.
    TransitiveSize { part: usize, size: usize, tr: usize },
    /// `d(S_first, S_second) < 1 - lambda` for `first < second`.
    PairDensity {
        first: usize,
        second: usize,
        density: String,
    },
    /// The per-vertex condition fails for `vertex` of part `part` against
    /// part `other`.
    VertexDensity {
        part: usize,
        vertex: usize,
        other: usize,
        density: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureCertificate {
    pub passed: bool,
    pub strong: bool,
    pub violations: Vec<Violation>,
}

/// Checks the size and density conditions of a structure, and the
/// per-vertex conditions when `strong` is set.
///
/// `transitive` marks parts that must induce transitive subtournaments of
/// size at least `c tr(T)` instead of `c n`; pass `None` for all-dense
/// structures. Every violated condition is listed.
pub fn verify_structure(
    t: &Tournament,
    parts: &[Vec<usize>],
    c: Rational,
    lambda: Rational,
    strong: bool,
    transitive: Option<&[bool]>,
) -> Result<StructureCertificate> {
    check_parts(t, parts)?;
    if let Some(w) = transitive {
        if w.len() != parts.len() {
            return Err(Error::invalid("one transitivity flag per part"));
        }
    }
    let n = t.order() as i64;
    let floor = Rational::from_integer(1) - lambda;
    let mut violations = Vec::new();
    let mut tr = None;
    for (i, part) in parts.iter().enumerate() {
        let size = part.len();
        if transitive.is_some_and(|w| w[i]) {
            if !t.is_transitive_set(part) {
                violations.push(Violation::NotTransitive { part: i });
            }
            let tr = match tr {
                Some(x) => x,
                None => *tr.insert(largest_transitive(t)?.len()),
            };
            if Rational::from_integer(size as i64) < c * Rational::from_integer(tr as i64) {
                violations.push(Violation::TransitiveSize { part: i, size, tr });
            }
        } else if Rational::from_integer(size as i64) < c * Rational::from_integer(n) {
            violations.push(Violation::PartSize { part: i, size });
        }
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let d = density(t, &parts[i], &parts[j])?;
            if d < floor {
                violations.push(Violation::PairDensity {
                    first: i,
                    second: j,
                    density: d.to_string(),
                });
            }
        }
    }
    if strong {
        for (i, part) in parts.iter().enumerate() {
            for &v in part {
                for (j, other) in parts.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let d = if i < j {
                        density(t, &[v], other)?
                    } else {
                        density(t, other, &[v])?
                    };
                    if d < floor {
                        violations.push(Violation::VertexDensity {
                            part: i,
                            vertex: v,
                            other: j,
                            density: d.to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(StructureCertificate {
        passed: violations.is_empty(),
        strong,
        violations,
    })
}

/// Smallest `lambda` for which the density conditions hold (per-vertex ones
/// too when `strong` is set).
pub fn effective_lambda(t: &Tournament, parts: &[Vec<usize>], strong: bool) -> Result<Rational> {
    check_parts(t, parts)?;
    let one = Rational::from_integer(1);
    let mut worst = Rational::from_integer(0);
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            worst = worst.max(one - density(t, &parts[i], &parts[j])?);
            if strong {
                for &v in &parts[i] {
                    worst = worst.max(one - density(t, &[v], &parts[j])?);
                }
                for &v in &parts[j] {
                    worst = worst.max(one - density(t, &parts[i], &[v])?);
                }
            }
        }
    }
    Ok(worst)
}

/// Vertices of part `j` that go against the part order with `v`, which lies
/// in part `i`: in-neighbours of `v` when `j > i`, out-neighbours when `j < i`.
pub fn neighborhood(
    t: &Tournament,
    parts: &[Vec<usize>],
    v: usize,
    j: usize,
) -> Result<Vec<usize>> {
    let i = parts
        .iter()
        .position(|p| p.contains(&v))
        .ok_or_else(|| Error::invalid(format!("vertex {v} lies in no part")))?;
    if j >= parts.len() || j == i {
        return Err(Error::invalid(format!("part {j} is not another part")));
    }
    Ok(neighborhood_in(t, i, v, j, &parts[j]))
}

fn neighborhood_in(t: &Tournament, i: usize, v: usize, j: usize, target: &[usize]) -> Vec<usize> {
    target
        .iter()
        .copied()
        .filter(|&w| if j > i { t.beats(w, v) } else { t.beats(v, w) })
        .collect()
}

/// Result of the trichotomy on a triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TripleVerdict {
    CompletePair(CompletePair),
    /// The triple is an `(i, j)`-triple, witnessed by `ordering` of part `i`.
    /// `coverage_j[k]` is the size of the union of the neighbourhoods of the
    /// first `k + 1` vertices in part `j`; `k_j` is the least prefix length
    /// reaching half of part `j` (likewise for the third part `l`).
    Triple {
        i: usize,
        j: usize,
        l: usize,
        ordering: Vec<usize>,
        k_j: usize,
        k_l: usize,
        coverage_j: Vec<usize>,
        coverage_l: Vec<usize>,
    },
}

impl TripleVerdict {
    pub fn pair(&self) -> Option<(usize, usize)> {
        match self {
            TripleVerdict::Triple { i, j, .. } => Some((*i, *j)),
            TripleVerdict::CompletePair(_) => None,
        }
    }
}

fn check_triple(t: &Tournament, sets: &[Vec<usize>]) -> Result<()> {
    if sets.len() != 3 {
        return Err(Error::invalid("a triple has exactly three parts"));
    }
    check_parts(t, sets)
}

fn check_roles(i: usize, j: usize) -> Result<usize> {
    if i > 2 || j > 2 || i == j {
        return Err(Error::invalid(format!(
            "({i}, {j}) is not a pair of distinct parts of a triple"
        )));
    }
    Ok(3 - i - j)
}

/// Cumulative coverage of part `j` by prefixes of `ordering` (a listing of
/// part `i`).
fn coverage(
    t: &Tournament,
    sets: &[Vec<usize>],
    i: usize,
    j: usize,
    ordering: &[usize],
) -> Vec<usize> {
    let mut seen = vec![0u64; t.words()];
    ordering
        .iter()
        .map(|&v| {
            for w in neighborhood_in(t, i, v, j, &sets[j]) {
                bits::set(&mut seen, w);
            }
            bits::count(&seen)
        })
        .collect()
}

fn first_half(cov: &[usize], size: usize) -> Option<usize> {
    cov.iter().position(|&c| 2 * c >= size).map(|k| k + 1)
}

/// Pair between part `i` and the vertices of part `j` that no vertex of part
/// `i` reaches.
fn uncovered_pair(t: &Tournament, sets: &[Vec<usize>], i: usize, j: usize) -> Option<CompletePair> {
    let cov = coverage(t, sets, i, j, &sets[i]);
    let total = cov.last().copied().unwrap_or(0);
    if 2 * total >= sets[j].len() {
        return None;
    }
    let mut reached = vec![0u64; t.words()];
    for &v in &sets[i] {
        for w in neighborhood_in(t, i, v, j, &sets[j]) {
            bits::set(&mut reached, w);
        }
    }
    let rest: Vec<usize> = sets[j]
        .iter()
        .copied()
        .filter(|&w| !bits::test(&reached, w))
        .collect();
    Some(if j > i {
        CompletePair {
            from: sets[i].clone(),
            to: rest,
            from_part: i,
            to_part: j,
        }
    } else {
        CompletePair {
            from: rest,
            to: sets[i].clone(),
            from_part: j,
            to_part: i,
        }
    })
}

/// Classifies a triple as an `(i, j)`-triple, an `(i, l)`-triple with
/// `l = 3 - i - j`, or returns a complete pair.
///
/// If the neighbourhoods of all of part `i` cover less than half of part `j`
/// (or of part `l`), the uncovered rest of that part and part `i` form a
/// complete pair. Otherwise part `i` is listed by ascending vertex id and the
/// first prefix lengths reaching half of parts `j` and `l` are compared; ties
/// go to `(i, j)`.
pub fn classify_triple(
    t: &Tournament,
    sets: &[Vec<usize>],
    i: usize,
    j: usize,
) -> Result<TripleVerdict> {
    check_triple(t, sets)?;
    let l = check_roles(i, j)?;
    for side in [j, l] {
        if let Some(pair) = uncovered_pair(t, sets, i, side) {
            return Ok(TripleVerdict::CompletePair(pair));
        }
    }
    let mut ordering = sets[i].clone();
    ordering.sort_unstable();
    let coverage_j = coverage(t, sets, i, j, &ordering);
    let coverage_l = coverage(t, sets, i, l, &ordering);
    let k_j = first_half(&coverage_j, sets[j].len()).expect("total coverage reaches half");
    let k_l = first_half(&coverage_l, sets[l].len()).expect("total coverage reaches half");
    let (j, l, k_j, k_l, coverage_j, coverage_l) = if k_j >= k_l {
        (j, l, k_j, k_l, coverage_j, coverage_l)
    } else {
        (l, j, k_l, k_j, coverage_l, coverage_j)
    };
    Ok(TripleVerdict::Triple {
        i,
        j,
        l,
        ordering,
        k_j,
        k_l,
        coverage_j,
        coverage_l,
    })
}

/// Does `ordering` of part `i` witness the `(i, j)` definition: both
/// minima finite and the one for `j` no smaller than the one for `l`?
pub fn witnesses_pair(
    t: &Tournament,
    sets: &[Vec<usize>],
    i: usize,
    j: usize,
    ordering: &[usize],
) -> bool {
    let l = 3 - i - j;
    let kj = first_half(&coverage(t, sets, i, j, ordering), sets[j].len());
    let kl = first_half(&coverage(t, sets, i, l, ordering), sets[l].len());
    matches!((kj, kl), (Some(a), Some(b)) if a >= b)
}

impl StarShape {
    /// Edges `(from, to)` between the roles `0, 1, 2` of the vertex pattern
    /// sought in a triple of this kind.
    pub fn triple_pattern(self) -> [(usize, usize); 3] {
        match self {
            StarShape::Left => [(1, 0), (2, 0), (1, 2)],
            StarShape::Right => [(2, 0), (2, 1), (0, 1)],
            StarShape::Central => [(1, 0), (2, 1), (0, 2)],
        }
    }

    /// The `(i, j)` pairs whose triples this kind's witness search accepts.
    pub fn triple_pairs(self) -> [(usize, usize); 2] {
        match self {
            StarShape::Left => [(1, 0), (2, 0)],
            StarShape::Right => [(1, 2), (0, 2)],
            StarShape::Central => [(0, 1), (2, 1)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "witness", rename_all = "snake_case")]
pub enum Witness {
    /// `[v0, v1, v2]` with `v_m` in part `m`, carrying the kind's pattern.
    Vertices {
        vertices: [usize; 3],
    },
    Pair(CompletePair),
}

impl Witness {
    /// Re-checks the witness against the triple: the vertex pattern edge by
    /// edge, or completeness plus the half-size bound on both sides.
    pub fn validate(&self, t: &Tournament, sets: &[Vec<usize>], kind: StarShape) -> bool {
        match self {
            Witness::Vertices { vertices } => {
                (0..3).all(|m| sets[m].contains(&vertices[m]))
                    && kind
                        .triple_pattern()
                        .iter()
                        .all(|&(a, b)| t.beats(vertices[a], vertices[b]))
            }
            Witness::Pair(p) => {
                p.validate(t)
                    && p.from_part < 3
                    && p.to_part < 3
                    && p.from.iter().all(|v| sets[p.from_part].contains(v))
                    && p.to.iter().all(|v| sets[p.to_part].contains(v))
                    && 2 * p.from.len() >= sets[p.from_part].len()
                    && 2 * p.to.len() >= sets[p.to_part].len()
            }
        }
    }
}

/// First pattern triple in lexicographic order of `(v0, v1, v2)`.
fn pattern_triple(t: &Tournament, sets: &[Vec<usize>], kind: StarShape) -> Option<[usize; 3]> {
    let pattern = kind.triple_pattern();
    let row = |v: usize, me: usize, other: usize| {
        if pattern.contains(&(me, other)) {
            t.out_row(v)
        } else {
            t.in_row(v)
        }
    };
    let third = bits::from_list(t.words(), &sets[2]);
    let mut s0 = sets[0].clone();
    let mut s1 = sets[1].clone();
    s0.sort_unstable();
    s1.sort_unstable();
    for &v0 in &s0 {
        let mut cand0 = third.clone();
        bits::and_assign(&mut cand0, row(v0, 0, 2));
        if bits::is_empty(&cand0) {
            continue;
        }
        for &v1 in s1.iter().filter(|&&v1| bits::test(row(v0, 0, 1), v1)) {
            let mut cand = cand0.clone();
            bits::and_assign(&mut cand, row(v1, 1, 2));
            let first = bits::ones(&cand).next();
            if let Some(v2) = first {
                return Some([v0, v1, v2]);
            }
        }
    }
    None
}

/// The prefix construction: for prefixes `K` of the
/// canonical listing of part `i`, the union of neighbourhoods in part `j`
/// against part `l` minus the union of neighbourhoods there.
fn prefix_pair(t: &Tournament, sets: &[Vec<usize>], i: usize, j: usize) -> Option<CompletePair> {
    let l = 3 - i - j;
    let mut ordering = sets[i].clone();
    ordering.sort_unstable();
    let mut in_j = vec![0u64; t.words()];
    let mut in_l = vec![0u64; t.words()];
    for &v in &ordering {
        for w in neighborhood_in(t, i, v, j, &sets[j]) {
            bits::set(&mut in_j, w);
        }
        for w in neighborhood_in(t, i, v, l, &sets[l]) {
            bits::set(&mut in_l, w);
        }
        let a = bits::to_list(&in_j);
        let b: Vec<usize> = sets[l]
            .iter()
            .copied()
            .filter(|&w| !bits::test(&in_l, w))
            .collect();
        if 2 * a.len() < sets[j].len() || 2 * b.len() < sets[l].len() {
            continue;
        }
        let forward = CompletePair {
            from: a.clone(),
            to: b.clone(),
            from_part: j,
            to_part: l,
        };
        if forward.validate(t) {
            return Some(forward);
        }
        let backward = CompletePair {
            from: b,
            to: a,
            from_part: l,
            to_part: j,
        };
        if backward.validate(t) {
            return Some(backward);
        }
    }
    None
}

/// Sets larger than this use a greedy biclique search.
const EXACT_BICLIQUE_MAX: usize = 20;

/// `A` inside part `x`, `B` inside part `y`, `A` complete to `B`, each at
/// least half its part.
fn half_biclique(t: &Tournament, sets: &[Vec<usize>], x: usize, y: usize) -> Option<CompletePair> {
    let (sx, sy) = (&sets[x], &sets[y]);
    let need_x = sx.len().div_ceil(2);
    let need_y = sy.len().div_ceil(2);
    let make = |from: Vec<usize>, to: Vec<usize>| CompletePair {
        from,
        to,
        from_part: x,
        to_part: y,
    };
    // Enumerate the smaller side's subsets of minimum size; the other side is
    // then forced to be the common neighbourhood.
    let (small, need_small, small_is_x) = if sx.len() <= sy.len() {
        (sx, need_x, true)
    } else {
        (sy, need_y, false)
    };
    let other = if small_is_x { sy } else { sx };
    let need_other = if small_is_x { need_y } else { need_x };
    let common = |chosen: &[usize]| -> Vec<usize> {
        other
            .iter()
            .copied()
            .filter(|&w| {
                chosen.iter().all(|&u| {
                    if small_is_x {
                        t.beats(u, w)
                    } else {
                        t.beats(w, u)
                    }
                })
            })
            .collect()
    };
    if small.len() <= EXACT_BICLIQUE_MAX {
        let mut pick: Vec<usize> = (0..need_small).collect();
        loop {
            let chosen: Vec<usize> = pick.iter().map(|&p| small[p]).collect();
            let rest = common(&chosen);
            if rest.len() >= need_other {
                return Some(if small_is_x {
                    make(chosen, rest)
                } else {
                    make(rest, chosen)
                });
            }
            // next combination
            let m = small.len();
            let mut idx = need_small;
            loop {
                if idx == 0 {
                    return None;
                }
                idx -= 1;
                if pick[idx] < m - need_small + idx {
                    break;
                }
                if idx == 0 && pick[0] >= m - need_small {
                    return None;
                }
            }
            pick[idx] += 1;
            for q in idx + 1..need_small {
                pick[q] = pick[q - 1] + 1;
            }
        }
    }
    // Greedy: keep the vertices of the small side with the most reach.
    let mut ranked: Vec<usize> = small.clone();
    ranked.sort_by_key(|&u| {
        std::cmp::Reverse(
            other
                .iter()
                .filter(|&&w| {
                    if small_is_x {
                        t.beats(u, w)
                    } else {
                        t.beats(w, u)
                    }
                })
                .count(),
        )
    });
    let chosen: Vec<usize> = ranked[..need_small].to_vec();
    let rest = common(&chosen);
    (rest.len() >= need_other).then(|| {
        if small_is_x {
            make(chosen, rest)
        } else {
            make(rest, chosen)
        }
    })
}

/// Vertex triple or complete pair for a triple already known to be an
/// `(i, j)`-triple of the kind's shape.
fn witness_for(
    t: &Tournament,
    sets: &[Vec<usize>],
    kind: StarShape,
    i: usize,
    j: usize,
) -> Result<Witness> {
    if let Some(vertices) = pattern_triple(t, sets, kind) {
        return Ok(Witness::Vertices { vertices });
    }
    if let Some(pair) = prefix_pair(t, sets, i, j) {
        return Ok(Witness::Pair(pair));
    }
    let l = 3 - i - j;
    for (x, y) in [(j, l), (l, j), (i, j), (j, i), (i, l), (l, i)] {
        if let Some(pair) = half_biclique(t, sets, x, y) {
            return Ok(Witness::Pair(pair));
        }
    }
    Err(Error::invariant(format!(
        "no {} vertex pattern and no complete pair of half-size sides in the ({i}, {j})-triple",
        kind.name()
    )))
}

/// Runs the witness search for `kind`, after checking that the triple is an
/// `(i, j)`-triple for one of the kind's pairs.
pub fn witness(t: &Tournament, sets: &[Vec<usize>], kind: StarShape) -> Result<Witness> {
    check_triple(t, sets)?;
    for (i, j) in kind.triple_pairs() {
        if classify_triple(t, sets, i, j)?.pair() == Some((i, j)) {
            return witness_for(t, sets, kind, i, j);
        }
    }
    Err(Error::invalid(format!(
        "triple is not classified as a {} triple",
        kind.name()
    )))
}

/// Witness search when the caller already knows the classification.
pub fn witness_with_pair(
    t: &Tournament,
    sets: &[Vec<usize>],
    kind: StarShape,
    i: usize,
    j: usize,
) -> Result<Witness> {
    check_triple(t, sets)?;
    check_roles(i, j)?;
    if !kind.triple_pairs().contains(&(i, j)) {
        return Err(Error::invalid(format!(
            "({i}, {j}) is not a {} pair",
            kind.name()
        )));
    }
    witness_for(t, sets, kind, i, j)
}

pub fn witness_left(t: &Tournament, sets: &[Vec<usize>]) -> Result<Witness> {
    witness(t, sets, StarShape::Left)
}

pub fn witness_right(t: &Tournament, sets: &[Vec<usize>]) -> Result<Witness> {
    witness(t, sets, StarShape::Right)
}

pub fn witness_central(t: &Tournament, sets: &[Vec<usize>]) -> Result<Witness> {
    witness(t, sets, StarShape::Central)
}

/// A pattern tournament spread across a structure: `phi[a]` is the part that
/// holds vertex `a` of the pattern, and `rows[s][a]` is the `s`-th vertex
/// chosen for it. Each row should induce a copy of the pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalityMap {
    pub pattern: Tournament,
    pub phi: Vec<usize>,
    pub rows: Vec<Vec<usize>>,
}

fn equal_sizes(parts: &[Vec<usize>]) -> Result<usize> {
    let t = parts.first().map_or(0, |p| p.len());
    if parts.iter().any(|p| p.len() != t) {
        return Err(Error::invalid("normality needs parts of equal size"));
    }
    Ok(t)
}

/// Checks both conditions of normality: the rows list every part
/// `parts[phi[a]]` exactly once down column `a`, and every row induces the
/// pattern through `a -> rows[s][a]`.
pub fn is_normal(t: &Tournament, parts: &[Vec<usize>], map: &NormalityMap) -> Result<bool> {
    let size = equal_sizes(parts)?;
    let h = map.pattern.order();
    if map.phi.len() != h || map.phi.iter().any(|&p| p >= parts.len()) {
        return Err(Error::invalid(
            "phi must send every pattern vertex to a part",
        ));
    }
    let mut used = map.phi.clone();
    used.sort_unstable();
    if used.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("phi must be injective"));
    }
    if map.rows.len() != size || map.rows.iter().any(|r| r.len() != h) {
        return Ok(false);
    }
    for a in 0..h {
        let mut column: Vec<usize> = map.rows.iter().map(|r| r[a]).collect();
        let mut part = parts[map.phi[a]].clone();
        column.sort_unstable();
        part.sort_unstable();
        if column != part {
            return Ok(false);
        }
    }
    Ok(map
        .rows
        .iter()
        .all(|row| Embedding { map: row.clone() }.validate(&map.pattern, t)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Extraction {
    /// `rows[m]` is the row chosen for map `m`; `embedding` sends each vertex
    /// of `product` into the host.
    Embedding {
        rows: Vec<usize>,
        product: Tournament,
        embedding: Embedding,
    },
    /// No compatible choice of rows exists and `lambda` is at or above the
    /// threshold that would have guaranteed one.
    LambdaTooLarge,
    /// No compatible choice of rows exists even though `lambda` is below the
    /// threshold, so the structure is not as strong as claimed.
    NotFound,
}

/// Quantities from the clique argument, kept for reporting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub outcome: Extraction,
    pub parts: usize,
    pub graph_vertices: usize,
    pub graph_edges: usize,
    /// `(|V|^2 / 2)(1 - 1/p)(1 - eps)` with `eps = lambda * max|H|^2`.
    pub edge_bound: String,
    pub edge_bound_holds: bool,
    /// More than `(1 - 1/(p-1)) |V|^2 / 2` edges forces a `p`-clique.
    pub turan_guarantee: bool,
    /// `1 / ((p-1)^2 max|H|^2)`; absent for a single map.
    pub lambda_threshold: Option<String>,
}

/// Finds rows, one per map, whose union induces the product of the patterns
/// placed at their parts, through a clique in the compatibility graph.
///
/// Two rows of different maps are compatible when every pair of their
/// vertices points from the lower-numbered part to the higher one. The
/// search runs whatever the value of `lambda`.
pub fn extract_product(
    t: &Tournament,
    parts: &[Vec<usize>],
    lambda: Rational,
    maps: &[NormalityMap],
) -> Result<ExtractionReport> {
    check_parts(t, parts)?;
    let size = equal_sizes(parts)?;
    if maps.is_empty() {
        return Err(Error::invalid("need at least one normality map"));
    }
    let mut used: Vec<usize> = maps.iter().flat_map(|m| m.phi.iter().copied()).collect();
    used.sort_unstable();
    if used.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("maps must use disjoint parts"));
    }
    for (m, map) in maps.iter().enumerate() {
        if !is_normal(t, parts, map)? {
            return Err(Error::invalid(format!(
                "structure is not normal for map {m}"
            )));
        }
    }
    let p = maps.len();
    let id = |m: usize, s: usize| m * size + s;
    let mut g = SimpleGraph::new(p * size);
    for m1 in 0..p {
        for m2 in m1 + 1..p {
            for s1 in 0..size {
                for s2 in 0..size {
                    if rows_compatible(t, &maps[m1], s1, &maps[m2], s2) {
                        g.add_edge(id(m1, s1), id(m2, s2));
                    }
                }
            }
        }
    }
    let max_h = maps.iter().map(|m| m.pattern.order()).max().unwrap_or(1) as i64;
    let v = (p * size) as i64;
    let one = Rational::from_integer(1);
    let eps = lambda * Rational::from_integer(max_h * max_h);
    let edge_bound = Rational::new(v * v, 2) * (one - Rational::new(1, p as i64)) * (one - eps);
    let e = g.edge_count();
    let turan_guarantee = p >= 2
        && Rational::from_integer(e as i64)
            > Rational::new(v * v, 2) * (one - Rational::new(1, (p - 1).max(1) as i64));
    let threshold = (p >= 2).then(|| Rational::new(1, ((p - 1) * (p - 1)) as i64 * max_h * max_h));

    let outcome = match turan_clique(&g, p) {
        Some(clique) => {
            let rows: Vec<usize> = clique.iter().map(|&x| x % size).collect();
            let parts_list: Vec<(Tournament, Placement)> = maps
                .iter()
                .map(|m| {
                    (
                        m.pattern.clone(),
                        Placement(m.phi.iter().map(|&x| x + 1).collect()),
                    )
                })
                .collect();
            let prod = product(&parts_list)?;
            let map = prod
                .origin
                .iter()
                .map(|&(m, a)| maps[m].rows[rows[m]][a])
                .collect();
            let embedding = Embedding { map };
            if !embedding.validate(&prod.tournament, t) {
                return Err(Error::invariant("clique rows do not induce the product"));
            }
            Extraction::Embedding {
                rows,
                product: prod.tournament,
                embedding,
            }
        }
        None => match threshold {
            Some(th) if lambda >= th => Extraction::LambdaTooLarge,
            _ => Extraction::NotFound,
        },
    };
    Ok(ExtractionReport {
        outcome,
        parts: p,
        graph_vertices: p * size,
        graph_edges: e,
        edge_bound: edge_bound.to_string(),
        edge_bound_holds: Rational::from_integer(e as i64) >= edge_bound,
        turan_guarantee,
        lambda_threshold: threshold.map(|x| x.to_string()),
    })
}

fn rows_compatible(
    t: &Tournament,
    m1: &NormalityMap,
    s1: usize,
    m2: &NormalityMap,
    s2: usize,
) -> bool {
    m1.rows[s1].iter().zip(&m1.phi).all(|(&v1, &k1)| {
        m2.rows[s2].iter().zip(&m2.phi).all(|(&v2, &k2)| {
            if k1 < k2 {
                t.beats(v1, v2)
            } else {
                t.beats(v2, v1)
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::small_star;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    /// Parts of `sizes` consecutive vertices; all edges forward except those
    /// listed by `back`.
    fn blocks(
        sizes: &[usize],
        back: impl Fn(usize, usize) -> bool,
    ) -> (Tournament, Vec<Vec<usize>>) {
        let mut parts = Vec::new();
        let mut next = 0;
        for &s in sizes {
            parts.push((next..next + s).collect::<Vec<_>>());
            next += s;
        }
        let t = Tournament::from_fn(next, |u, v| !back(u, v));
        (t, parts)
    }

    #[test]
    fn structure_examples() {
        let (t, parts) = blocks(&[4], |_, _| false);
        assert!(
            verify_structure(&t, &parts, r(1, 1), r(0, 1), true, None)
                .unwrap()
                .passed
        );

        let (t, parts) = blocks(&[3, 3], |_, _| false);
        let cert = verify_structure(&t, &parts, r(1, 2), r(0, 1), true, None).unwrap();
        assert!(cert.passed);

        let (t, parts) = blocks(&[3, 3], |u, v| u < 3 && v >= 3);
        let cert = verify_structure(&t, &parts, r(1, 2), r(1, 2), false, None).unwrap();
        assert!(!cert.passed);
        assert!(matches!(
            cert.violations[0],
            Violation::PairDensity {
                first: 0,
                second: 1,
                ..
            }
        ));

        let (t, _) = blocks(&[4], |_, _| false);
        assert!(
            verify_structure(&t, &[vec![0, 1], vec![1, 2]], r(0, 1), r(0, 1), false, None).is_err()
        );
    }

    #[test]
    fn transitive_parts_use_tr() {
        let (t, parts) = blocks(&[3, 3], |_, _| false);
        let cert =
            verify_structure(&t, &parts, r(1, 2), r(0, 1), false, Some(&[true, false])).unwrap();
        assert!(cert.passed);
        let c3 = Tournament::cyclic_triangle();
        let cert = verify_structure(
            &c3,
            &[vec![0, 1, 2]],
            r(1, 2),
            r(0, 1),
            false,
            Some(&[true]),
        )
        .unwrap();
        assert!(matches!(
            cert.violations[0],
            Violation::NotTransitive { part: 0 }
        ));
    }

    #[test]
    fn effective_lambda_of_forward_blocks_is_zero() {
        let (t, parts) = blocks(&[2, 3, 2], |_, _| false);
        assert_eq!(effective_lambda(&t, &parts, true).unwrap(), r(0, 1));
        let (t, parts) = blocks(&[2, 2], |u, v| u == 0 && v == 2);
        assert_eq!(effective_lambda(&t, &parts, false).unwrap(), r(1, 4));
        assert_eq!(effective_lambda(&t, &parts, true).unwrap(), r(1, 2));
    }

    #[test]
    fn neighborhood_examples() {
        let (t, parts) = blocks(&[2, 2], |_, _| false);
        assert!(neighborhood(&t, &parts, 0, 1).unwrap().is_empty());
        let (t, parts) = blocks(&[2, 2], |u, v| u < 2 && v >= 2);
        assert_eq!(neighborhood(&t, &parts, 0, 1).unwrap(), vec![2, 3]);
        assert_eq!(neighborhood(&t, &parts, 3, 0).unwrap(), vec![0, 1]);
        assert!(neighborhood(&t, &parts, 9, 0).is_err());
    }

    #[test]
    fn uncovered_part_gives_a_complete_pair() {
        let (t, parts) = blocks(&[3, 3, 3], |_, _| false);
        let v = classify_triple(&t, &parts, 1, 0).unwrap();
        let TripleVerdict::CompletePair(p) = v else {
            panic!("expected a pair")
        };
        assert!(p.validate(&t));
        assert_eq!((p.from_part, p.to_part), (0, 1));
        assert_eq!(p.from.len(), 3);
    }

    #[test]
    fn full_coverage_ties_go_to_j() {
        let (t, parts) = blocks(&[2, 2, 2], |_, _| true);
        let v = classify_triple(&t, &parts, 1, 0).unwrap();
        match v {
            TripleVerdict::Triple { i, j, k_j, k_l, .. } => {
                assert_eq!((i, j, k_j, k_l), (1, 0, 1, 1));
            }
            _ => panic!("expected a triple"),
        }
    }

    #[test]
    fn complete_left_pattern_is_found_at_once() {
        // part 1 -> part 0, part 2 -> part 0, part 1 -> part 2
        let (t, parts) = blocks(&[3, 3, 3], |u, v| u < 3 && v >= 3);
        // the third part is never reached, so this is not classified as a triple
        assert!(witness_left(&t, &parts).is_err());
        let w = witness_with_pair(&t, &parts, StarShape::Left, 1, 0).unwrap();
        assert!(w.validate(&t, &parts, StarShape::Left));
        assert!(matches!(
            w,
            Witness::Vertices {
                vertices: [0, 3, 6]
            }
        ));
    }

    #[test]
    fn adversarial_left_triple_yields_a_pair() {
        // Part 1 beats part 0 and is beaten by part 2, while part 0 beats
        // all of part 2, so no vertex of part 2 beats one of part 0.
        let (t, parts) = blocks(&[4, 2, 4], |u, v| {
            (u < 4 && (4..6).contains(&v)) || ((4..6).contains(&u) && v >= 6)
        });
        let w = witness_left(&t, &parts).unwrap();
        assert!(matches!(w, Witness::Pair(_)));
        assert!(w.validate(&t, &parts, StarShape::Left));
    }

    #[test]
    fn witness_rejects_other_kinds() {
        let (t, parts) = blocks(&[3, 3, 3], |_, _| false);
        assert!(witness_left(&t, &parts).is_err());
    }

    #[test]
    fn normal_stacked_copies() {
        let (h, _) = small_star(StarShape::Central);
        let (t, parts, map) = stacked(&h, 4, &[0, 1, 2]);
        assert!(is_normal(&t, &parts, &map).unwrap());
        let mut broken = map.clone();
        broken.rows[0].swap(0, 1);
        assert!(!is_normal(&t, &parts, &broken).unwrap());
        let single = NormalityMap {
            pattern: Tournament::transitive(1),
            phi: vec![1],
            rows: parts[1].iter().map(|&v| vec![v]).collect(),
        };
        assert!(is_normal(&t, &parts, &single).unwrap());
        assert!(is_normal(&t, &[vec![0], vec![1, 2]], &single).is_err());
    }

    /// `rows` copies of `h` spread over parts `phi`, each part a block of
    /// `rows` vertices; everything between different rows points forward
    /// along the part order.
    fn stacked(
        h: &Tournament,
        rows: usize,
        phi: &[usize],
    ) -> (Tournament, Vec<Vec<usize>>, NormalityMap) {
        let k = phi.iter().max().unwrap() + 1;
        let vertex = |part: usize, row: usize| part * rows + row;
        let mut owner = vec![None; k * rows];
        for (a, &p) in phi.iter().enumerate() {
            for s in 0..rows {
                owner[vertex(p, s)] = Some((a, s));
            }
        }
        let t = Tournament::from_fn(k * rows, |u, v| match (owner[u], owner[v]) {
            (Some((a, s)), Some((b, q))) if s == q => h.beats(a, b),
            _ => true,
        });
        let parts: Vec<Vec<usize>> = (0..k)
            .map(|p| (0..rows).map(|s| vertex(p, s)).collect())
            .collect();
        let map = NormalityMap {
            pattern: h.clone(),
            phi: phi.to_vec(),
            rows: (0..rows)
                .map(|s| phi.iter().map(|&p| vertex(p, s)).collect())
                .collect(),
        };
        (t, parts, map)
    }

    #[test]
    fn single_map_extracts_any_row() {
        let (h, _) = small_star(StarShape::Left);
        let (t, parts, map) = stacked(&h, 3, &[0, 1, 2]);
        let rep = extract_product(&t, &parts, r(0, 1), &[map]).unwrap();
        assert!(matches!(rep.outcome, Extraction::Embedding { .. }));
        assert!(rep.lambda_threshold.is_none());
    }

    #[test]
    fn two_stars_extract_with_forward_cross_edges() {
        let (l, _) = small_star(StarShape::Left);
        let (c, _) = small_star(StarShape::Central);
        let size = 4;
        // parts 0..6, left star on parts {0, 2, 4}, central star on {1, 3, 5}
        let phi_l = [0, 2, 4];
        let phi_c = [1, 3, 5];
        let vertex = |part: usize, row: usize| part * size + row;
        let n = 6 * size;
        let t = Tournament::from_fn(n, |u, v| {
            let (pu, su) = (u / size, u % size);
            let (pv, sv) = (v / size, v % size);
            if su == sv {
                let l_u = phi_l.iter().position(|&p| p == pu);
                let l_v = phi_l.iter().position(|&p| p == pv);
                let c_u = phi_c.iter().position(|&p| p == pu);
                let c_v = phi_c.iter().position(|&p| p == pv);
                match (l_u, l_v, c_u, c_v) {
                    (Some(a), Some(b), _, _) => return l.beats(a, b),
                    (_, _, Some(a), Some(b)) => return c.beats(a, b),
                    _ => {}
                }
            }
            pu <= pv
        });
        let parts: Vec<Vec<usize>> = (0..6)
            .map(|p| (0..size).map(|s| vertex(p, s)).collect())
            .collect();
        let maps: Vec<NormalityMap> = [(l.clone(), phi_l), (c.clone(), phi_c)]
            .into_iter()
            .map(|(h, phi)| NormalityMap {
                pattern: h,
                phi: phi.to_vec(),
                rows: (0..size)
                    .map(|s| phi.iter().map(|&p| vertex(p, s)).collect())
                    .collect(),
            })
            .collect();
        let lambda = effective_lambda(&t, &parts, true).unwrap();
        let rep = extract_product(&t, &parts, lambda, &maps).unwrap();
        let Extraction::Embedding {
            product, embedding, ..
        } = &rep.outcome
        else {
            panic!("expected an embedding")
        };
        assert_eq!(product.order(), 6);
        assert!(embedding.validate(product, &t));
        assert!(crate::containment::contains(&t, product).is_some());
        assert!(rep.edge_bound_holds);
    }

    fn random_triple(seed: u64, sizes: [usize; 3], p: f64) -> (Tournament, Vec<Vec<usize>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n: usize = sizes.iter().sum();
        let t = Tournament::from_fn(n, |_, _| !rng.gen_bool(p));
        let mut parts = Vec::new();
        let mut next = 0;
        for s in sizes {
            parts.push((next..next + s).collect());
            next += s;
        }
        (t, parts)
    }

    fn permutations(v: &[usize]) -> Vec<Vec<usize>> {
        if v.len() <= 1 {
            return vec![v.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..v.len() {
            let mut rest = v.to_vec();
            let x = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn strong_implies_plain(seed in any::<u64>(), lam in 0i64..4) {
            let (t, parts) = random_triple(seed, [3, 3, 3], 0.2);
            let lambda = r(lam, 4);
            let strong = verify_structure(&t, &parts, r(1, 4), lambda, true, None).unwrap();
            let plain = verify_structure(&t, &parts, r(1, 4), lambda, false, None).unwrap();
            if strong.passed {
                prop_assert!(plain.passed);
            }
            prop_assert!(effective_lambda(&t, &parts, false).unwrap() <= effective_lambda(&t, &parts, true).unwrap());
        }

        #[test]
        fn neighborhoods_match_edge_scan(seed in any::<u64>()) {
            let (t, parts) = random_triple(seed, [2, 2, 2], 0.5);
            for i in 0..3 {
                for &v in &parts[i] {
                    for j in (0..3).filter(|&j| j != i) {
                        let got = neighborhood(&t, &parts, v, j).unwrap();
                        let want: Vec<usize> = parts[j].iter().copied().filter(|&w| {
                            (j > i && t.beats(w, v)) || (j < i && t.beats(v, w))
                        }).collect();
                        prop_assert_eq!(got, want);
                    }
                }
            }
        }

        #[test]
        fn classification_is_witnessed(seed in any::<u64>(), i in 0usize..3, dj in 1usize..3, p in 0.1f64..0.9) {
            let j = (i + dj) % 3;
            let (t, parts) = random_triple(seed, [3, 4, 3], p);
            match classify_triple(&t, &parts, i, j).unwrap() {
                TripleVerdict::CompletePair(pair) => {
                    prop_assert!(pair.validate(&t));
                    prop_assert!(2 * pair.from.len() >= parts[pair.from_part].len());
                    prop_assert!(2 * pair.to.len() >= parts[pair.to_part].len());
                }
                TripleVerdict::Triple { i: ii, j: jj, ordering, .. } => {
                    prop_assert_eq!(ii, i);
                    prop_assert!(witnesses_pair(&t, &parts, ii, jj, &ordering));
                    // the winning side also holds under the existential definition
                    prop_assert!(permutations(&parts[ii]).iter().any(|o| witnesses_pair(&t, &parts, ii, jj, o)));
                }
            }
        }

        #[test]
        fn witnesses_revalidate(seed in any::<u64>(), kind_i in 0usize..3, p in 0.05f64..0.95) {
            let kind = StarShape::ALL[kind_i];
            let (t, parts) = random_triple(seed, [4, 5, 4], p);
            match witness(&t, &parts, kind) {
                Ok(w) => prop_assert!(w.validate(&t, &parts, kind)),
                Err(Error::InvalidInput(_)) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
