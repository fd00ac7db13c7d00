//! Transitive subtournaments: the exact maximum by subset dynamic programming
//! and the logarithmic majority construction for large inputs.

use crate::budget;
use crate::error::Result;
use crate::tournament::Tournament;

/// A maximum transitive vertex set, ascending by vertex id.
///
/// Sweeps all `2^n` subsets: a subset is transitive iff removing its lowest
/// vertex `u` leaves a transitive subset and no out-neighbour of `u` inside the
/// subset beats an in-neighbour of `u` inside it (that would close a 3-cycle).
pub fn largest_transitive(t: &Tournament) -> Result<Vec<usize>> {
    let n = t.order();
    budget::check("largest_transitive", n, budget::limits().tr_max_n)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let out: Vec<u32> = (0..n).map(|v| t.out_mask(v) as u32).collect();
    let total = 1usize << n;
    let mut ok = vec![0u64; total.div_ceil(64)];
    ok[0] = 1;
    let mut best = 0u32;
    let mut best_size = 0u32;
    for mask in 1..total as u32 {
        let u = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        if (ok[(rest >> 6) as usize] >> (rest & 63)) & 1 == 0 {
            continue;
        }
        let outs = out[u] & rest;
        let ins = rest & !outs;
        let mut good = true;
        let mut o = outs;
        while o != 0 {
            let b = o.trailing_zeros() as usize;
            o &= o - 1;
            if out[b] & ins != 0 {
                good = false;
                break;
            }
        }
        if good {
            ok[(mask >> 6) as usize] |= 1 << (mask & 63);
            let size = mask.count_ones();
            if size > best_size {
                best_size = size;
                best = mask;
            }
        }
    }
    Ok(crate::bits::mask_ones(best as u64).collect())
}

/// `tr(T)`, the size of a largest transitive subtournament.
pub fn transitive_number(t: &Tournament) -> Result<usize> {
    largest_transitive(t).map(|s| s.len())
}

/// A transitive set of size at least `floor(log2 n) + 1`, listed from source
/// to sink.
///
/// Repeatedly takes the vertex with the most out-neighbours among the
/// remaining candidates and keeps the larger of its out- and in-neighbourhoods;
/// each step halves the candidates at worst.
pub fn stearns_transitive(t: &Tournament) -> Vec<usize> {
    let n = t.order();
    let mut alive = crate::bits::from_list(t.words(), &(0..n).collect::<Vec<_>>());
    let mut head = Vec::new();
    let mut tail = Vec::new();
    while !crate::bits::is_empty(&alive) {
        let v = crate::bits::ones(&alive)
            .max_by_key(|&v| {
                (
                    crate::bits::count_and(t.out_row(v), &alive),
                    std::cmp::Reverse(v),
                )
            })
            .expect("nonempty");
        let mut outs = alive.clone();
        crate::bits::and_assign(&mut outs, t.out_row(v));
        let mut ins = alive.clone();
        crate::bits::and_assign(&mut ins, t.in_row(v));
        if crate::bits::count(&outs) >= crate::bits::count(&ins) {
            head.push(v);
            alive = outs;
        } else {
            tail.push(v);
            alive = ins;
        }
    }
    tail.reverse();
    head.extend(tail);
    head
}

/// `floor(log2 n) + 1`, or 0 for the empty tournament.
pub fn stearns_bound(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        n.ilog2() as usize + 1
    }
}
