//! Homogeneous sets (modules) and primality.
//!
//! A module is a set `X` such that every vertex outside `X` either beats all of
//! `X` or is beaten by all of `X`. A tournament is prime when its only modules
//! are the empty set, singletons, and the whole vertex set.

use crate::bits;
use crate::tournament::Tournament;

/// The smallest module containing both `u` and `v`, as a bitset.
///
/// Grows `{u, v}` by any outside vertex that splits it until none is left;
/// every vertex added this way belongs to every module containing `u` and `v`.
fn module_closure(t: &Tournament, u: usize, v: usize) -> Vec<u64> {
    let n = t.order();
    let w = t.words();
    let mut x = bits::from_list(w, &[u, v]);
    let mut size = 2;
    loop {
        let mut grew = false;
        for z in 0..n {
            if bits::test(&x, z) {
                continue;
            }
            let beaten = bits::count_and(t.out_row(z), &x);
            if beaten != 0 && beaten != size {
                bits::set(&mut x, z);
                size += 1;
                grew = true;
            }
        }
        if !grew || size == n {
            return x;
        }
    }
}

/// A nontrivial module, `2 <= |X| < n`, if any. Returns a smallest one; ties
/// go to the first vertex pair in lexicographic order.
pub fn find_module(t: &Tournament) -> Option<Vec<usize>> {
    let n = t.order();
    let mut best: Option<Vec<u64>> = None;
    let mut best_size = n;
    for u in 0..n {
        for v in u + 1..n {
            let x = module_closure(t, u, v);
            let size = bits::count(&x);
            if size < best_size {
                best_size = size;
                best = Some(x);
                if size == 2 {
                    return best.map(|x| bits::to_list(&x));
                }
            }
        }
    }
    best.map(|x| bits::to_list(&x))
}

/// True when no nontrivial module exists. Tournaments on at most two vertices
/// are prime by this definition.
pub fn is_prime(t: &Tournament) -> bool {
    find_module(t).is_none()
}

/// Checks the module property directly.
pub fn is_module(t: &Tournament, x: &[usize]) -> bool {
    let set = bits::from_list(t.words(), x);
    (0..t.order()).filter(|&z| !bits::test(&set, z)).all(|z| {
        let beaten = bits::count_and(t.out_row(z), &set);
        beaten == 0 || beaten == x.len()
    })
}
