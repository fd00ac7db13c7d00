//! Subtournament containment, freeness, random free tournaments, and the
//! empirical exponent harness.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::budget;
use crate::error::{Error, Result};
use crate::tournament::{Tournament, VertexOrdering};
use crate::transitive::largest_transitive;

/// Injective map from the vertices of a pattern into a host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    /// Is this an injective, orientation-preserving map from `h` into `t`?
    pub fn validate(&self, h: &Tournament, t: &Tournament) -> bool {
        if self.map.len() != h.order() {
            return false;
        }
        let mut seen = vec![false; t.order()];
        for &x in &self.map {
            if x >= t.order() || seen[x] {
                return false;
            }
            seen[x] = true;
        }
        (0..h.order()).all(|a| {
            (0..h.order()).all(|b| a == b || h.beats(a, b) == t.beats(self.map[a], self.map[b]))
        })
    }

    pub fn image(&self) -> Vec<usize> {
        self.map.clone()
    }
}

struct Matcher<'a> {
    t: &'a Tournament,
    h: &'a Tournament,
    order: Vec<usize>,
    map: Vec<usize>,
    used: Vec<u64>,
    eligible: Vec<Vec<u64>>,
}

impl Matcher<'_> {
    fn go(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let x = self.order[depth];
        let mut cand = self.eligible[x].clone();
        bits::and_not_assign(&mut cand, &self.used);
        for &y in &self.order[..depth] {
            let row = if self.h.beats(x, y) {
                self.t.in_row(self.map[y])
            } else {
                self.t.out_row(self.map[y])
            };
            bits::and_assign(&mut cand, row);
            if bits::is_empty(&cand) {
                return false;
            }
        }
        for v in bits::to_list(&cand) {
            self.map[x] = v;
            bits::set(&mut self.used, v);
            if self.go(depth + 1) {
                return true;
            }
            bits::clear(&mut self.used, v);
        }
        false
    }
}

/// Finds an induced copy of `h` in `t`.
///
/// Pattern vertices are matched in decreasing order of backward degree
/// (under the pattern's own labeling), each against the host vertices that
/// agree with every earlier match and have enough in- and out-degree.
pub fn contains(t: &Tournament, h: &Tournament) -> Option<Embedding> {
    let (n, k) = (t.order(), h.order());
    if k > n {
        return None;
    }
    if k == 0 {
        return Some(Embedding { map: Vec::new() });
    }
    let back = h.backward_edges(&VertexOrdering::identity(k));
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&x| (std::cmp::Reverse(back.degree(x)), x));
    let eligible = (0..k)
        .map(|x| {
            let (o, i) = (h.out_degree(x), h.in_degree(x));
            let good: Vec<usize> = (0..n)
                .filter(|&v| t.out_degree(v) >= o && t.in_degree(v) >= i)
                .collect();
            bits::from_list(t.words(), &good)
        })
        .collect();
    let mut m = Matcher {
        t,
        h,
        order,
        map: vec![usize::MAX; k],
        used: vec![0; t.words()],
        eligible,
    };
    if m.go(0) {
        Some(Embedding { map: m.map })
    } else {
        None
    }
}

fn falling_factorial(n: usize, k: usize) -> u128 {
    (0..k).map(|i| (n - i) as u128).product()
}

/// Tries every injective map in lexicographic order; limited by
/// `NEBULAE_BRUTE_FORCE_MAX` on the number of maps.
pub fn brute_force_contains(t: &Tournament, h: &Tournament) -> Result<Option<Embedding>> {
    let (n, k) = (t.order(), h.order());
    if k > n {
        return Ok(None);
    }
    let maps = falling_factorial(n, k);
    let limit = budget::limits().brute_force_max;
    if maps > limit {
        return Err(Error::BudgetExceeded {
            what: "brute_force_contains",
            size: maps.min(usize::MAX as u128) as usize,
            limit: limit.min(usize::MAX as u128) as usize,
        });
    }
    fn rec(t: &Tournament, h: &Tournament, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        if map.len() == h.order() {
            let e = Embedding { map: map.clone() };
            return e.validate(h, t);
        }
        for v in 0..t.order() {
            if !used[v] {
                used[v] = true;
                map.push(v);
                if rec(t, h, map, used) {
                    return true;
                }
                map.pop();
                used[v] = false;
            }
        }
        false
    }
    let mut map = Vec::with_capacity(k);
    let mut used = vec![false; n];
    Ok(if rec(t, h, &mut map, &mut used) {
        Some(Embedding { map })
    } else {
        None
    })
}

/// True when `t` contains no member of `family`.
pub fn is_free(t: &Tournament, family: &[Tournament]) -> bool {
    family.iter().all(|h| contains(t, h).is_none())
}

/// Probability that a repaired edge agrees with the run's reference ordering.
const REPAIR_BIAS: f64 = 0.75;

/// A seeded tournament on `n` vertices that avoids every member of `family`.
///
/// Starts from a uniform random tournament. While some copy of a forbidden
/// tournament remains, the edges inside the copy are redrawn, each agreeing
/// with a hidden random ordering with probability 3/4, so the process drifts
/// toward transitive tournaments. Returns `None` after `max_tries` redraws.
pub fn random_free_tournament(
    n: usize,
    family: &[Tournament],
    seed: u64,
    max_tries: usize,
) -> Option<Tournament> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(&mut rng);
    let mut forward = vec![vec![false; n]; n];
    for (u, row) in forward.iter_mut().enumerate() {
        for cell in &mut row[u + 1..] {
            *cell = rng.gen();
        }
    }
    let build = |f: &Vec<Vec<bool>>| Tournament::from_fn(n, |u, v| f[u][v]);
    let mut t = build(&forward);
    for _ in 0..=max_tries {
        let copy = family.iter().find_map(|h| contains(&t, h));
        let Some(copy) = copy else {
            return Some(t);
        };
        for (i, &a) in copy.map.iter().enumerate() {
            for &b in &copy.map[i + 1..] {
                let (u, v) = (a.min(b), a.max(b));
                let agree = rng.gen_bool(REPAIR_BIAS);
                forward[u][v] = (rank[u] < rank[v]) == agree;
            }
        }
        t = build(&forward);
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentSample {
    pub n: usize,
    pub index: usize,
    pub seed: u64,
    pub tr: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeFailures {
    pub n: usize,
    pub attempted: usize,
    pub failed: usize,
    /// More than half of the attempts at this size failed.
    pub flagged: bool,
}

/// Least-squares fit of `ln tr` against `ln n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub samples: Vec<ExponentSample>,
    pub failures: Vec<SizeFailures>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub std_error: Option<f64>,
    /// Slope plus or minus 1.96 standard errors.
    pub band: Option<(f64, f64)>,
}

/// Seed for sample `index` at size `n`, so samples can be evaluated in any
/// order.
pub fn sample_seed(seed: u64, n: usize, index: usize) -> u64 {
    let mut z = seed
        ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn empirical_eh_exponent(
    family: &[Tournament],
    sizes: &[usize],
    samples_per_size: usize,
    seed: u64,
    max_tries: usize,
) -> Result<ExponentReport> {
    for &n in sizes {
        budget::check("largest_transitive", n, budget::limits().tr_max_n)?;
    }
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for &n in sizes {
        let mut failed = 0;
        for index in 0..samples_per_size {
            let s = sample_seed(seed, n, index);
            match random_free_tournament(n, family, s, max_tries) {
                Some(t) => {
                    let tr = largest_transitive(&t)?.len();
                    samples.push(ExponentSample {
                        n,
                        index,
                        seed: s,
                        tr,
                    });
                }
                None => failed += 1,
            }
        }
        failures.push(SizeFailures {
            n,
            attempted: samples_per_size,
            failed,
            flagged: 2 * failed > samples_per_size,
        });
    }
    let points: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| ((s.n as f64).ln(), (s.tr as f64).ln()))
        .collect();
    let (slope, intercept, std_error) = fit(&points);
    Ok(ExponentReport {
        samples,
        failures,
        slope,
        intercept,
        std_error,
        band: slope
            .zip(std_error)
            .map(|(b, se)| (b - 1.96 * se, b + 1.96 * se)),
    })
}

fn fit(points: &[(f64, f64)]) -> (Option<f64>, Option<f64>, Option<f64>) {
    let m = points.len() as f64;
    if points.len() < 2 {
        return (None, None, None);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return (None, None, None);
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = (points.len() > 2).then(|| {
        let ssr: f64 = points
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        (ssr / (m - 2.0) / sxx).sqrt()
    });
    (Some(slope), Some(intercept), se)
}
