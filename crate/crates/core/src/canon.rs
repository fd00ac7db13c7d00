//! Canonical forms, isomorphism testing, and enumeration of isomorphism classes.
//!
//! The canonical labeling is the lexicographically least upper-triangle
//! encoding among all labelings that respect an iterated score refinement.
//! The refinement is itself isomorphism invariant, so restricting the search
//! to it keeps the form complete and sound.

use std::collections::BTreeMap;

use crate::budget;
use crate::error::{Error, Result};
use crate::tournament::Tournament;

/// Byte string `[n, packed upper-triangle bits...]` of the canonical labeling.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(pub Vec<u8>);

/// Iterated refinement starting from scores. Returns a color per vertex; colors
/// are ranks in a canonically sorted order of signatures.
fn refine(t: &Tournament) -> Vec<usize> {
    let n = t.order();
    let mut color: Vec<usize> = t.scores();
    let mut classes = distinct(&color);
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut outs: Vec<usize> = t.out_neighbors(v).iter().map(|&w| color[w]).collect();
                outs.sort_unstable();
                (color[v], outs)
            })
            .collect();
        let mut sorted = sigs.clone();
        sorted.sort();
        sorted.dedup();
        let next: Vec<usize> = sigs
            .iter()
            .map(|s| sorted.binary_search(s).expect("present"))
            .collect();
        let count = sorted.len();
        color = next;
        if count == classes {
            return color;
        }
        classes = count;
    }
}

fn distinct(v: &[usize]) -> usize {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len()
}

struct Search<'a> {
    t: &'a Tournament,
    cell_of_pos: Vec<usize>,
    cells: Vec<Vec<usize>>,
    perm: Vec<usize>,
    used: Vec<bool>,
    code: Vec<bool>,
    best_code: Vec<bool>,
    best_perm: Vec<usize>,
    have_best: bool,
}

impl Search<'_> {
    fn go(&mut self, depth: usize) {
        let n = self.t.order();
        if depth == n {
            if !self.have_best || self.code < self.best_code {
                self.best_code.clone_from(&self.code);
                self.best_perm.clone_from(&self.perm);
                self.have_best = true;
            }
            return;
        }
        let cell = self.cell_of_pos[depth];
        let start = self.code.len();
        for idx in 0..self.cells[cell].len() {
            let v = self.cells[cell][idx];
            if self.used[v] {
                continue;
            }
            // column `depth`: does the vertex at position i beat v?
            for i in 0..depth {
                self.code.push(self.t.beats(self.perm[i], v));
            }
            let len = self.code.len();
            let worse = self.have_best && self.code[..] > self.best_code[..len];
            if !worse {
                self.used[v] = true;
                self.perm.push(v);
                self.go(depth + 1);
                self.perm.pop();
                self.used[v] = false;
            }
            self.code.truncate(start);
        }
    }
}

/// `perm[i]` is the original vertex placed at canonical position `i`.
pub fn canonical_labeling(t: &Tournament) -> Result<Vec<usize>> {
    let n = t.order();
    budget::check("canonical_form", n, budget::limits().canon_max_n)?;
    let color = refine(t);
    let k = distinct(&color);
    let mut cells = vec![Vec::new(); k];
    for v in 0..n {
        cells[color[v]].push(v);
    }
    let cell_of_pos: Vec<usize> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, members)| std::iter::repeat_n(c, members.len()))
        .collect();
    let mut s = Search {
        t,
        cell_of_pos,
        cells,
        perm: Vec::with_capacity(n),
        used: vec![false; n],
        code: Vec::with_capacity(n * n / 2),
        best_code: Vec::new(),
        best_perm: Vec::new(),
        have_best: false,
    };
    s.go(0);
    Ok(s.best_perm)
}

fn encode(t: &Tournament) -> Vec<u8> {
    let n = t.order();
    let mut bytes = vec![n as u8];
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 0..n {
        for i in 0..j {
            acc = (acc << 1) | t.beats(i, j) as u8;
            filled += 1;
            if filled == 8 {
                bytes.push(acc);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        bytes.push(acc << (8 - filled));
    }
    bytes
}

pub fn canonical_form(t: &Tournament) -> Result<CanonicalForm> {
    let perm = canonical_labeling(t)?;
    Ok(CanonicalForm(encode(&t.relabel(&perm)?)))
}

/// The canonically labelled copy of `t`.
pub fn canonical_tournament(t: &Tournament) -> Result<Tournament> {
    t.relabel(&canonical_labeling(t)?)
}

pub fn isomorphic(a: &Tournament, b: &Tournament) -> Result<bool> {
    if a.order() != b.order() {
        return Ok(false);
    }
    let (mut sa, mut sb) = (a.scores(), b.scores());
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

/// One canonically labelled representative per isomorphism class on `n`
/// vertices, sorted by canonical form.
///
/// Classes on `n` vertices are generated from those on `n - 1` by adding a
/// vertex with every possible out-neighbourhood; every class arises this way
/// because deleting any vertex lands in some smaller class.
pub fn enumerate_tournaments(n: usize) -> Result<Vec<Tournament>> {
    budget::check("enumerate_tournaments", n, budget::limits().enum_max_n)?;
    if n == 0 {
        return Err(Error::invalid("enumeration needs n >= 1"));
    }
    let mut level = vec![Tournament::transitive(1)];
    for m in 2..=n {
        let mut seen: BTreeMap<CanonicalForm, Tournament> = BTreeMap::new();
        for base in &level {
            for mask in 0u64..(1 << (m - 1)) {
                let t = Tournament::from_fn(m, |u, v| {
                    if v == m - 1 {
                        (mask >> u) & 1 == 1
                    } else {
                        base.beats(u, v)
                    }
                });
                let perm = canonical_labeling(&t)?;
                let canon = t.relabel(&perm)?;
                seen.entry(CanonicalForm(encode(&canon))).or_insert(canon);
            }
        }
        level = seen.into_values().collect();
    }
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn all_labeled(n: usize) -> impl Iterator<Item = Tournament> {
        let pairs = n * (n - 1) / 2;
        (0u64..1 << pairs).map(move |bits| {
            let mut i = 0;
            Tournament::from_fn(n, |_, _| {
                let b = (bits >> i) & 1 == 1;
                i += 1;
                b
            })
        })
    }

    /// Minimum encoding over all n! labelings.
    fn brute_form(t: &Tournament) -> Vec<u8> {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for i in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(i, n - 1);
                    out.push(q);
                }
            }
            out
        }
        perms(t.order())
            .into_iter()
            .map(|p| encode(&t.relabel(&p).unwrap()))
            .min()
            .unwrap()
    }

    #[test]
    fn triangle_relabelings_agree() {
        let c3 = Tournament::cyclic_triangle();
        let r = c3.relabel(&[2, 0, 1]).unwrap();
        assert!(isomorphic(&c3, &r).unwrap());
        assert!(!isomorphic(&Tournament::transitive(3), &c3).unwrap());
    }

    #[test]
    fn labeled_four_vertex_tournaments_form_four_classes() {
        let forms: BTreeSet<_> = all_labeled(4)
            .map(|t| canonical_form(&t).unwrap())
            .collect();
        assert_eq!(forms.len(), 4);
        let brute: BTreeSet<_> = all_labeled(4).map(|t| brute_form(&t)).collect();
        assert_eq!(brute.len(), 4);
    }

    #[test]
    fn class_counts() {
        let expected = [1, 1, 2, 4, 12, 56];
        for (i, &c) in expected.iter().enumerate() {
            assert_eq!(
                enumerate_tournaments(i + 1).unwrap().len(),
                c,
                "n = {}",
                i + 1
            );
        }
    }

    #[test]
    fn enumeration_matches_labeled_canonicalization() {
        for n in 1..=6 {
            let brute: BTreeSet<_> = all_labeled(n)
                .map(|t| canonical_form(&t).unwrap())
                .collect();
            assert_eq!(enumerate_tournaments(n).unwrap().len(), brute.len());
        }
    }

    #[test]
    fn enumeration_is_over_budget_above_eight() {
        assert!(matches!(
            enumerate_tournaments(11),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    proptest! {
        #[test]
        fn form_is_invariant_under_relabeling(n in 1usize..=9, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng, seq::SliceRandom};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let t = Tournament::from_fn(n, |_, _| rng.gen());
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rng);
            let r = t.relabel(&p).unwrap();
            prop_assert_eq!(canonical_form(&t).unwrap(), canonical_form(&r).unwrap());
            prop_assert!(isomorphic(&t, &r).unwrap());
        }

        #[test]
        fn equal_forms_only_for_isomorphic_pairs(n in 1usize..=5, s1 in any::<u64>(), s2 in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(s1);
            let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(s2);
            let a = Tournament::from_fn(n, |_, _| r1.gen());
            let b = Tournament::from_fn(n, |_, _| r2.gen());
            prop_assert_eq!(
                canonical_form(&a).unwrap() == canonical_form(&b).unwrap(),
                brute_form(&a) == brute_form(&b)
            );
        }
    }
}
