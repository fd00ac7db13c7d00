//! Word-vector bitset helpers used by the general (n > 64) code paths.

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

#[inline]
pub(crate) fn set(row: &mut [u64], v: usize) {
    row[v >> 6] |= 1u64 << (v & 63);
}

#[inline]
pub(crate) fn clear(row: &mut [u64], v: usize) {
    row[v >> 6] &= !(1u64 << (v & 63));
}

#[inline]
pub(crate) fn test(row: &[u64], v: usize) -> bool {
    (row[v >> 6] >> (v & 63)) & 1 == 1
}

pub(crate) fn from_list(words: usize, vs: &[usize]) -> Vec<u64> {
    let mut row = vec![0u64; words];
    for &v in vs {
        set(&mut row, v);
    }
    row
}

#[inline]
pub(crate) fn count(row: &[u64]) -> usize {
    row.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub(crate) fn count_and(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

#[inline]
pub(crate) fn is_empty(row: &[u64]) -> bool {
    row.iter().all(|&w| w == 0)
}

pub(crate) fn and_assign(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x &= *y;
    }
}

pub(crate) fn and_not_assign(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x &= !*y;
    }
}

pub(crate) fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

pub(crate) fn ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

pub(crate) fn to_list(row: &[u64]) -> Vec<usize> {
    ones(row).collect()
}

/// Iterates the set bits of a single word.
pub(crate) fn mask_ones(mut m: u64) -> impl Iterator<Item = usize> + Clone {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_crosses_word_boundaries() {
        let row = from_list(3, &[0, 63, 64, 130]);
        assert_eq!(to_list(&row), vec![0, 63, 64, 130]);
        assert_eq!(count(&row), 4);
    }

    #[test]
    fn mask_iteration() {
        assert_eq!(mask_ones(0b1011).collect::<Vec<_>>(), vec![0, 1, 3]);
    }
}
