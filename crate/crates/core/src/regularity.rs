//! Regular pairs and partitions, the greedy embedding into regular parts, and
//! the staged pipeline that turns a regular partition of a tournament into a
//! strong structure.
//!
//! Nothing here finds regular partitions. Partitions are supplied (or cut
//! into equal consecutive blocks) and then checked.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget;
use crate::containment::Embedding;
use crate::error::{Error, Result};
use crate::graph::{max_clique, turan_clique, SimpleGraph};
use crate::structures::{verify_structure, Rational, StructureCertificate};
use crate::tournament::{check_distinct, density, Tournament};

pub use crate::transitive::{stearns_bound, stearns_transitive};

/// Subsets `X` of `A`, `Y` of `B` whose density strays from `d(A, B)` by more
/// than `eps`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairViolation {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub density: String,
    pub pair_density: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PairVerdict {
    Pass,
    Fail(PairViolation),
}

impl PairVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, PairVerdict::Pass)
    }
}

fn gap(a: Rational, b: Rational) -> Rational {
    if a > b {
        a - b
    } else {
        b - a
    }
}

/// Smallest subset size allowed by `|X| >= eps |A|`, and never 0.
fn min_size(eps: Rational, len: usize) -> usize {
    let need = (eps * Rational::from_integer(len as i64))
        .ceil()
        .to_integer();
    (need.max(1) as usize).min(len.max(1))
}

fn check_pair(t: &Tournament, a: &[usize], b: &[usize], eps: Rational) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("regular pairs need nonempty sides"));
    }
    let mut all = a.to_vec();
    all.extend_from_slice(b);
    check_distinct(t.order(), &all)?;
    if eps <= Rational::from_integer(0) || eps > Rational::from_integer(1) {
        return Err(Error::invalid("eps must lie in (0, 1]"));
    }
    Ok(())
}

/// For a fixed `X`, finds the `Y` of each allowed size with the highest and
/// lowest density (by sorting the edge counts into `X`) and reports a
/// violation if either strays too far.
fn best_partner(
    t: &Tournament,
    x: &[usize],
    b: &[usize],
    min_y: usize,
    x_is_source: bool,
    eps: Rational,
    base: Rational,
) -> Option<(Vec<usize>, Rational)> {
    let mut counts: Vec<(usize, usize)> = b
        .iter()
        .map(|&y| {
            let c = x
                .iter()
                .filter(|&&v| {
                    if x_is_source {
                        t.beats(v, y)
                    } else {
                        t.beats(y, v)
                    }
                })
                .count();
            (c, y)
        })
        .collect();
    counts.sort_unstable_by(|p, q| q.0.cmp(&p.0).then(p.1.cmp(&q.1)));
    for size in min_y..=b.len() {
        for top in [true, false] {
            let chosen: Vec<(usize, usize)> = if top {
                counts[..size].to_vec()
            } else {
                counts[counts.len() - size..].to_vec()
            };
            let edges: usize = chosen.iter().map(|c| c.0).sum();
            let d = Rational::new(edges as i64, (x.len() * size) as i64);
            if gap(d, base) > eps {
                let mut y: Vec<usize> = chosen.into_iter().map(|c| c.1).collect();
                y.sort_unstable();
                return Some((y, d));
            }
        }
    }
    None
}

/// Exact check of `eps`-regularity, returning a violating pair when one
/// exists. Every qualifying subset of the smaller side is scanned; for each,
/// the extreme subsets of the other side are found by sorting.
pub fn regular_pair_exact(
    t: &Tournament,
    a: &[usize],
    b: &[usize],
    eps: Rational,
) -> Result<PairVerdict> {
    check_pair(t, a, b, eps)?;
    let small = a.len().min(b.len());
    budget::check(
        "regular_pair_exact",
        small,
        budget::limits().regular_exact_max,
    )?;
    let base = density(t, a, b)?;
    let a_small = a.len() <= b.len();
    let (s, other) = if a_small { (a, b) } else { (b, a) };
    let min_s = min_size(eps, s.len());
    let min_o = min_size(eps, other.len());
    for mask in 1u32..(1u32 << s.len()) {
        if (mask.count_ones() as usize) < min_s {
            continue;
        }
        let chosen: Vec<usize> = crate::bits::mask_ones(mask as u64).map(|i| s[i]).collect();
        if let Some((partner, d)) = best_partner(t, &chosen, other, min_o, a_small, eps, base) {
            let (x, y) = if a_small {
                (chosen, partner)
            } else {
                (partner, chosen)
            };
            return Ok(PairVerdict::Fail(PairViolation {
                x,
                y,
                density: d.to_string(),
                pair_density: base.to_string(),
            }));
        }
    }
    Ok(PairVerdict::Pass)
}

/// Randomized check: `trials` random qualifying `X` in `A`, each paired with
/// the extreme `Y` in `B`. A failure carries a checked violation; a pass is
/// only evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampledVerdict {
    pub verdict: PairVerdict,
    pub trials: usize,
    pub note: String,
}

pub fn regular_pair_sampled(
    t: &Tournament,
    a: &[usize],
    b: &[usize],
    eps: Rational,
    trials: usize,
    seed: u64,
) -> Result<SampledVerdict> {
    check_pair(t, a, b, eps)?;
    let base = density(t, a, b)?;
    let min_a = min_size(eps, a.len());
    let min_b = min_size(eps, b.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = a.to_vec();
    for trial in 0..trials {
        let size = rng.gen_range(min_a..=a.len());
        pool.shuffle(&mut rng);
        let mut x = pool[..size].to_vec();
        x.sort_unstable();
        if let Some((y, d)) = best_partner(t, &x, b, min_b, true, eps, base) {
            let v = PairViolation {
                x,
                y,
                density: d.to_string(),
                pair_density: base.to_string(),
            };
            return Ok(SampledVerdict {
                verdict: PairVerdict::Fail(v),
                trials: trial + 1,
                note: "violation found; the pair is not regular".into(),
            });
        }
    }
    Ok(SampledVerdict {
        verdict: PairVerdict::Pass,
        trials,
        note: format!("no violation in {trials} random subsets; regularity is not certified"),
    })
}

/// How pairs are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CheckMode {
    Exact,
    Sampled {
        trials: usize,
        seed: u64,
    },
    /// Exact when the smaller side fits the budget, sampled otherwise.
    Auto {
        trials: usize,
        seed: u64,
    },
}

impl Default for CheckMode {
    fn default() -> Self {
        CheckMode::Auto {
            trials: 200,
            seed: 0,
        }
    }
}

/// Checks one pair under `mode`; the flag says whether the answer is exact.
pub fn check_regular_pair(
    t: &Tournament,
    a: &[usize],
    b: &[usize],
    eps: Rational,
    mode: CheckMode,
) -> Result<(PairVerdict, bool)> {
    let fits = a.len().min(b.len()) <= budget::limits().regular_exact_max;
    match mode {
        CheckMode::Exact => Ok((regular_pair_exact(t, a, b, eps)?, true)),
        CheckMode::Auto { .. } if fits => Ok((regular_pair_exact(t, a, b, eps)?, true)),
        CheckMode::Sampled { trials, seed } | CheckMode::Auto { trials, seed } => {
            let v = regular_pair_sampled(t, a, b, eps, trials, seed)?;
            let exact = !v.verdict.passed();
            Ok((v.verdict, exact))
        }
    }
}

/// An exceptional set and equal-size parts covering the vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularPartition {
    pub exceptional: Vec<usize>,
    pub parts: Vec<Vec<usize>>,
}

impl RegularPartition {
    fn validate(&self, n: usize) -> Result<()> {
        if self.parts.is_empty() || self.parts.iter().any(|p| p.is_empty()) {
            return Err(Error::invalid("a partition needs nonempty parts"));
        }
        let mut all = self.exceptional.clone();
        all.extend(self.parts.iter().flatten());
        check_distinct(n, &all)?;
        if all.len() != n {
            return Err(Error::invalid(format!(
                "partition covers {} of {n} vertices",
                all.len()
            )));
        }
        Ok(())
    }
}

/// `k` consecutive blocks of `floor(n / k)` vertices; the remainder is the
/// exceptional set.
pub fn equal_split_partition(t: &Tournament, k: usize) -> Result<RegularPartition> {
    let n = t.order();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "cannot split {n} vertices into {k} parts"
        )));
    }
    let w = n / k;
    Ok(RegularPartition {
        exceptional: (k * w..n).collect(),
        parts: (0..k).map(|p| (p * w..(p + 1) * w).collect()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub exceptional_ok: bool,
    pub equal_sizes: bool,
    /// Pairs `(i, j)`, `i < j`, found irregular.
    pub irregular: Vec<(usize, usize)>,
    /// `eps k^2`.
    pub irregular_limit: String,
    pub irregular_ok: bool,
    /// All pair verdicts were exact (no probabilistic passes).
    pub exact: bool,
    pub passed: bool,
}

/// Checks the three conditions of an `eps`-regular partition.
pub fn verify_regular_partition(
    t: &Tournament,
    partition: &RegularPartition,
    eps: Rational,
    mode: CheckMode,
) -> Result<PartitionCertificate> {
    partition.validate(t.order())?;
    let n = t.order() as i64;
    let k = partition.parts.len();
    let exceptional_ok = Rational::from_integer(partition.exceptional.len() as i64)
        <= eps * Rational::from_integer(n);
    let w = partition.parts[0].len();
    let equal_sizes = partition.parts.iter().all(|p| p.len() == w);
    let mut irregular = Vec::new();
    let mut exact = true;
    for i in 0..k {
        for j in i + 1..k {
            let (v, e) =
                check_regular_pair(t, &partition.parts[i], &partition.parts[j], eps, mode)?;
            exact &= e;
            if !v.passed() {
                irregular.push((i, j));
            }
        }
    }
    let limit = eps * Rational::from_integer((k * k) as i64);
    let irregular_ok = Rational::from_integer(irregular.len() as i64) <= limit;
    Ok(PartitionCertificate {
        exceptional_ok,
        equal_sizes,
        irregular,
        irregular_limit: limit.to_string(),
        irregular_ok,
        exact,
        passed: exceptional_ok && equal_sizes && irregular_ok,
    })
}

/// Nodes the embedding search may visit before giving up.
const EMBED_NODE_LIMIT: usize = 100_000;

/// Maps vertex `i` of `h` into `parts[i]`, choosing at each step the
/// candidate that keeps the most candidates for the later vertices and
/// backtracking on dead ends within a fixed node limit.
///
/// Parts must have density at least `min_density` in both directions; their
/// regularity is the caller's responsibility.
pub fn embed_via_regular_parts(
    t: &Tournament,
    parts: &[Vec<usize>],
    h: &Tournament,
    min_density: Rational,
) -> Result<Option<Embedding>> {
    let k = h.order();
    if parts.len() != k {
        return Err(Error::invalid(format!(
            "need {k} parts, got {}",
            parts.len()
        )));
    }
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::invalid("parts must be nonempty"));
    }
    check_distinct(
        t.order(),
        &parts.iter().flatten().copied().collect::<Vec<_>>(),
    )?;
    for i in 0..k {
        for j in 0..k {
            if i != j && density(t, &parts[i], &parts[j])? < min_density {
                return Err(Error::invalid(format!(
                    "d(V{i}, V{j}) is below the required density"
                )));
            }
        }
    }
    let mut chosen = Vec::with_capacity(k);
    let mut nodes = 0;
    let cands: Vec<Vec<usize>> = parts.to_vec();
    Ok(embed_rec(t, h, &cands, &mut chosen, &mut nodes).then_some(Embedding { map: chosen }))
}

fn embed_rec(
    t: &Tournament,
    h: &Tournament,
    cands: &[Vec<usize>],
    chosen: &mut Vec<usize>,
    nodes: &mut usize,
) -> bool {
    let i = chosen.len();
    if i == h.order() {
        return true;
    }
    let narrow = |v: usize| -> Vec<Vec<usize>> {
        cands
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j <= i {
                    c.clone()
                } else {
                    c.iter()
                        .copied()
                        .filter(|&w| t.beats(v, w) == h.beats(i, j))
                        .collect()
                }
            })
            .collect()
    };
    let mut options: Vec<(usize, usize)> = cands[i]
        .iter()
        .map(|&v| {
            let next = narrow(v);
            let worst = next[i + 1..]
                .iter()
                .map(|c| c.len())
                .min()
                .unwrap_or(usize::MAX);
            (worst, v)
        })
        .filter(|&(worst, _)| worst > 0)
        .collect();
    options.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, v) in options {
        *nodes += 1;
        if *nodes > EMBED_NODE_LIMIT {
            return false;
        }
        chosen.push(v);
        if embed_rec(t, h, &narrow(v), chosen, nodes) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Smallest `u` with `C(x, 2) - eta x^2 > (k - 2) / (2 (k - 1)) x^2` for all
/// `x >= u`, found by direct search (the difference grows with `x`). `None`
/// when no such `u` exists below `limit`.
pub fn turan_part_count(k: usize, eta: Rational, limit: usize) -> Option<usize> {
    if k < 2 {
        return Some(1);
    }
    let rhs = Rational::new((k - 2) as i64, 2 * (k - 1) as i64);
    (1..=limit).find(|&x| {
        let x = x as i64;
        Rational::new(x * (x - 1), 2) - eta * Rational::from_integer(x * x)
            > rhs * Rational::from_integer(x * x)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub partition: PartitionCertificate,
    /// `lambda / (4P)`.
    pub lambda_cap: String,
    /// Minimum part count of the Turán step for `k = max(h, 2^(P-1))`.
    pub turan_parts: Option<usize>,
    /// Largest set of pairwise regular parts.
    pub regular_parts: Vec<usize>,
    pub good_pairs: Vec<(usize, usize)>,
    pub bad_pairs: Vec<(usize, usize)>,
    /// `2^(P-1)` parts with all pairs bad.
    pub stable_parts: Vec<usize>,
    /// Tournament on `stable_parts`, `i -> j` when `d(W_i, W_j) > 1 - lambda_cap`.
    pub derived: Tournament,
    /// Parts `W_1, ..., W_P` in transitive order.
    pub chosen_parts: Vec<usize>,
    /// `q_sizes[i][j] = |Q^i_j|` (0 on the diagonal).
    pub q_sizes: Vec<Vec<usize>>,
    /// Every `|Q^i_j| >= |W_i| (1 - 1/(2P))`.
    pub q_bound_holds: bool,
    pub f_sizes: Vec<usize>,
    pub sets: Vec<Vec<usize>>,
    /// `|A_1| / n`.
    pub c: String,
    pub certificate: StructureCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: u8,
    pub reason: String,
    /// A copy of `H` when the failure is that one was found.
    pub embedding: Option<Embedding>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum PipelineOutcome {
    Report(Box<PipelineReport>),
    Failed(StageFailure),
}

fn fail(stage: u8, reason: impl Into<String>) -> Result<PipelineOutcome> {
    Ok(PipelineOutcome::Failed(StageFailure {
        stage,
        reason: reason.into(),
        embedding: None,
    }))
}

/// Runs the stages that extract `p` sets forming a strong
/// `(c, lambda)`-structure from an `eta`-regular partition of a tournament
/// without `h`:
///
/// 0. verify the partition;
/// 1. take a largest set of pairwise regular parts;
/// 2. call a pair good when its density lies in `[L, 1 - L]`, `L = lambda / (4p)`;
/// 3. look for `|h|` pairwise good parts (and a copy of `h` across them),
///    else for `2^(p-1)` pairwise bad parts;
/// 4. orient the bad parts by density;
/// 5. take a transitive set of `p` of them;
/// 6. keep in each part the vertices dense enough towards all others;
/// 7. cut every kept set to `ceil(|W|/2)` vertices.
///
/// The final sets are re-checked against the strong structure conditions.
pub fn strong_structure_pipeline(
    t: &Tournament,
    partition: &RegularPartition,
    h: &Tournament,
    p: usize,
    lambda: Rational,
    eta: Rational,
    mode: CheckMode,
) -> Result<PipelineOutcome> {
    if p == 0 || p > 20 {
        return Err(Error::invalid("p must lie in 1..=20"));
    }
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    if lambda <= zero || lambda >= one {
        return Err(Error::invalid("lambda must lie in (0, 1)"));
    }
    let cert = verify_regular_partition(t, partition, eta, mode)?;
    if !cert.passed {
        return fail(0, format!("partition is not {eta}-regular: {cert:?}"));
    }
    let parts = &partition.parts;
    let m = parts.len();
    let cap = lambda / Rational::from_integer(4 * p as i64);
    let need_stable = 1usize << (p - 1);
    let turan_parts = turan_part_count(h.order().max(need_stable), eta, 1_000_000);

    // 1
    let mut g = SimpleGraph::new(m);
    for i in 0..m {
        for j in i + 1..m {
            if !cert.irregular.contains(&(i, j)) {
                g.add_edge(i, j);
            }
        }
    }
    let regular_parts = max_clique(&g);

    // 2
    let r = regular_parts.len();
    let mut good = SimpleGraph::new(r);
    let mut good_pairs = Vec::new();
    let mut bad_pairs = Vec::new();
    for a in 0..r {
        for b in a + 1..r {
            let (i, j) = (regular_parts[a], regular_parts[b]);
            let d = density(t, &parts[i], &parts[j])?;
            if cap <= d && d <= one - cap {
                good.add_edge(a, b);
                good_pairs.push((i, j));
            } else {
                bad_pairs.push((i, j));
            }
        }
    }

    // 3
    if let Some(clique) = turan_clique(&good, h.order()) {
        let chosen: Vec<Vec<usize>> = clique
            .iter()
            .map(|&a| parts[regular_parts[a]].clone())
            .collect();
        if let Some(e) = embed_via_regular_parts(t, &chosen, h, cap)? {
            if !e.validate(h, t) {
                return Err(Error::invariant(
                    "embedding into regular parts does not induce h",
                ));
            }
            return Ok(PipelineOutcome::Failed(StageFailure {
                stage: 3,
                reason: "pairwise good parts contain a copy of h".into(),
                embedding: Some(e),
            }));
        }
    }
    let Some(stable) = turan_clique(&good.complement(), need_stable) else {
        return fail(3, format!("no {need_stable} pairwise bad regular parts"));
    };
    let stable_parts: Vec<usize> = stable.iter().map(|&a| regular_parts[a]).collect();

    // 4
    let s = stable_parts.len();
    let mut dens = vec![vec![zero; s]; s];
    for a in 0..s {
        for b in 0..s {
            if a != b {
                dens[a][b] = density(t, &parts[stable_parts[a]], &parts[stable_parts[b]])?;
            }
        }
    }
    let derived = Tournament::from_fn(s, |a, b| dens[a][b] > one - cap);

    // 5
    let order = stearns_transitive(&derived);
    if order.len() < p {
        return fail(5, format!("transitive set of {} < {p} parts", order.len()));
    }
    let picked: Vec<usize> = order[..p].to_vec();
    let chosen_parts: Vec<usize> = picked.iter().map(|&a| stable_parts[a]).collect();
    for x in 0..p {
        for y in x + 1..p {
            if dens[picked[x]][picked[y]] <= one - cap {
                return fail(5, format!("d(W{x}, W{y}) is not above 1 - {cap}"));
            }
        }
    }

    // 6
    let ws: Vec<&Vec<usize>> = chosen_parts.iter().map(|&i| &parts[i]).collect();
    let floor = one - Rational::from_integer(2 * p as i64) * cap;
    let mut q_sizes = vec![vec![0; p]; p];
    let mut q_bound_holds = true;
    let mut kept = Vec::with_capacity(p);
    for i in 0..p {
        let mut f: Vec<usize> = ws[i].clone();
        for j in (0..p).filter(|&j| j != i) {
            let mut q = Vec::new();
            for &v in ws[i].iter() {
                let d = if i < j {
                    density(t, &[v], ws[j])?
                } else {
                    density(t, ws[j], &[v])?
                };
                if d >= floor {
                    q.push(v);
                }
            }
            q_sizes[i][j] = q.len();
            let want =
                Rational::from_integer(ws[i].len() as i64) * (one - Rational::new(1, 2 * p as i64));
            q_bound_holds &= Rational::from_integer(q.len() as i64) >= want;
            f.retain(|v| q.contains(v));
        }
        kept.push(f);
    }
    let f_sizes: Vec<usize> = kept.iter().map(|f| f.len()).collect();

    // 7
    let target = ws[0].len().div_ceil(2);
    if let Some(i) = kept.iter().position(|f| f.len() < target) {
        return fail(6, format!("|F_{i}| = {} < {target}", kept[i].len()));
    }
    let sets: Vec<Vec<usize>> = kept.iter().map(|f| f[..target].to_vec()).collect();
    let c = Rational::new(target as i64, t.order() as i64);
    let certificate = verify_structure(t, &sets, c, lambda, true, None)?;
    if !certificate.passed {
        return fail(
            7,
            format!(
                "final sets fail re-verification: {:?}",
                certificate.violations
            ),
        );
    }
    Ok(PipelineOutcome::Report(Box::new(PipelineReport {
        partition: cert,
        lambda_cap: cap.to_string(),
        turan_parts,
        regular_parts,
        good_pairs,
        bad_pairs,
        stable_parts,
        derived,
        chosen_parts,
        q_sizes,
        q_bound_holds,
        f_sizes,
        sets,
        c: c.to_string(),
        certificate,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn random(n: usize, seed: u64) -> Tournament {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Tournament::from_fn(n, |_, _| rng.gen::<bool>())
    }

    /// Scans every pair of qualifying subsets.
    fn brute_regular(t: &Tournament, a: &[usize], b: &[usize], eps: Rational) -> bool {
        let base = density(t, a, b).unwrap();
        let (ma, mb) = (min_size(eps, a.len()), min_size(eps, b.len()));
        for xm in 1u32..1 << a.len() {
            if (xm.count_ones() as usize) < ma {
                continue;
            }
            let x: Vec<usize> = crate::bits::mask_ones(xm as u64).map(|i| a[i]).collect();
            for ym in 1u32..1 << b.len() {
                if (ym.count_ones() as usize) < mb {
                    continue;
                }
                let y: Vec<usize> = crate::bits::mask_ones(ym as u64).map(|i| b[i]).collect();
                if gap(density(t, &x, &y).unwrap(), base) > eps {
                    return false;
                }
            }
        }
        true
    }

    fn check_violation(
        t: &Tournament,
        a: &[usize],
        b: &[usize],
        eps: Rational,
        v: &PairViolation,
    ) -> bool {
        let base = density(t, a, b).unwrap();
        v.x.iter().all(|x| a.contains(x))
            && v.y.iter().all(|y| b.contains(y))
            && v.x.len() >= min_size(eps, a.len())
            && v.y.len() >= min_size(eps, b.len())
            && gap(density(t, &v.x, &v.y).unwrap(), base) > eps
    }

    #[test]
    fn complete_pairs_are_regular() {
        let t = Tournament::transitive(10);
        let (a, b): (Vec<usize>, Vec<usize>) = ((0..5).collect(), (5..10).collect());
        for eps in [r(1, 10), r(1, 2), r(1, 1)] {
            assert!(regular_pair_exact(&t, &a, &b, eps).unwrap().passed());
            assert!(regular_pair_sampled(&t, &a, &b, eps, 50, 1)
                .unwrap()
                .verdict
                .passed());
        }
    }

    #[test]
    fn planted_corner_is_found() {
        // A beats B except a dense 3x3 corner pointing back.
        let t = Tournament::from_fn(16, |u, v| !(u < 3 && (8..11).contains(&v)));
        let (a, b): (Vec<usize>, Vec<usize>) = ((0..8).collect(), (8..16).collect());
        let PairVerdict::Fail(v) = regular_pair_exact(&t, &a, &b, r(1, 4)).unwrap() else {
            panic!("expected a violation")
        };
        assert!(check_violation(&t, &a, &b, r(1, 4), &v));
        assert!(!brute_regular(&t, &a, &b, r(1, 4)));
    }

    #[test]
    fn eps_one_passes() {
        let t = random(12, 3);
        let (a, b): (Vec<usize>, Vec<usize>) = ((0..6).collect(), (6..12).collect());
        assert!(regular_pair_exact(&t, &a, &b, r(1, 1)).unwrap().passed());
        assert!(regular_pair_sampled(&t, &a, &b, r(1, 1), 20, 0)
            .unwrap()
            .verdict
            .passed());
    }

    #[test]
    fn exact_check_respects_budget() {
        let t = random(40, 1);
        let (a, b): (Vec<usize>, Vec<usize>) = ((0..20).collect(), (20..40).collect());
        assert!(matches!(
            regular_pair_exact(&t, &a, &b, r(1, 2)),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(check_regular_pair(&t, &a, &b, r(1, 2), CheckMode::default()).is_ok());
    }

    #[test]
    fn partitions() {
        let t = Tournament::transitive(12);
        let p = equal_split_partition(&t, 3).unwrap();
        let cert = verify_regular_partition(&t, &p, r(1, 4), CheckMode::Exact).unwrap();
        assert!(cert.passed && cert.exact);
        let single = RegularPartition {
            exceptional: vec![],
            parts: vec![(0..12).collect()],
        };
        assert!(
            verify_regular_partition(&t, &single, r(1, 4), CheckMode::Exact)
                .unwrap()
                .passed
        );
        let big_exceptional = RegularPartition {
            exceptional: (0..6).collect(),
            parts: vec![(6..9).collect(), (9..12).collect()],
        };
        let cert =
            verify_regular_partition(&t, &big_exceptional, r(1, 4), CheckMode::Exact).unwrap();
        assert!(!cert.exceptional_ok && !cert.passed);
        let overlapping = RegularPartition {
            exceptional: vec![0],
            parts: vec![(0..6).collect(), (6..12).collect()],
        };
        assert!(verify_regular_partition(&t, &overlapping, r(1, 4), CheckMode::Exact).is_err());
    }

    #[test]
    fn embedding_into_random_parts() {
        let c3 = Tournament::cyclic_triangle();
        let mut found = 0;
        for seed in 0..20 {
            let t = random(30, seed);
            let parts: Vec<Vec<usize>> = (0..3).map(|p| (p * 10..(p + 1) * 10).collect()).collect();
            if let Some(e) = embed_via_regular_parts(&t, &parts, &c3, r(1, 10)).unwrap() {
                assert!(e.validate(&c3, &t));
                assert!((0..3).all(|i| parts[i].contains(&e.map[i])));
                found += 1;
            }
        }
        assert_eq!(found, 20);
        let t = random(5, 0);
        let one = embed_via_regular_parts(&t, &[vec![3, 4]], &Tournament::transitive(1), r(0, 1))
            .unwrap();
        assert_eq!(one.unwrap().map, vec![3]);
        let fwd = Tournament::transitive(6);
        let parts = vec![vec![0, 1, 2], vec![3, 4, 5]];
        assert!(
            embed_via_regular_parts(&fwd, &parts, &Tournament::transitive(2), r(1, 10)).is_err()
        );
    }

    #[test]
    fn turan_count() {
        assert_eq!(turan_part_count(3, r(0, 1), 100), Some(3));
        assert_eq!(turan_part_count(3, r(1, 4), 100), None);
        assert!(turan_part_count(4, r(1, 20), 1000).is_some());
    }

    /// `parts` blocks of `w` vertices, fully forward between blocks.
    fn forward_blocks(parts: usize, w: usize, seed: u64) -> Tournament {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Tournament::from_fn(parts * w, |u, v| u / w != v / w || rng.gen::<bool>())
    }

    #[test]
    fn pipeline_on_forward_blocks() {
        let t = forward_blocks(4, 8, 7);
        let part = equal_split_partition(&t, 4).unwrap();
        let out = strong_structure_pipeline(
            &t,
            &part,
            &Tournament::cyclic_triangle(),
            2,
            r(1, 4),
            r(1, 4),
            CheckMode::Exact,
        )
        .unwrap();
        let PipelineOutcome::Report(rep) = out else {
            panic!("expected a report, got {out:?}")
        };
        assert!(rep.certificate.passed);
        assert_eq!(rep.sets.len(), 2);
        assert!(rep.sets.iter().all(|s| s.len() == 4));
        assert!(rep.q_bound_holds);
        assert!(rep.good_pairs.is_empty());
    }

    #[test]
    fn pipeline_with_three_parts_reaches_the_end() {
        let t = forward_blocks(6, 6, 2);
        let part = equal_split_partition(&t, 6).unwrap();
        let out = strong_structure_pipeline(
            &t,
            &part,
            &Tournament::cyclic_triangle(),
            3,
            r(1, 3),
            r(1, 4),
            CheckMode::Exact,
        )
        .unwrap();
        let PipelineOutcome::Report(rep) = out else {
            panic!("expected a report, got {out:?}")
        };
        assert_eq!(rep.stable_parts.len(), 4);
        assert_eq!(rep.sets.len(), 3);
        assert!(rep.certificate.passed);
    }

    #[test]
    fn pipeline_reports_a_planted_copy() {
        // three blocks with fair coin flips everywhere: pairs are good
        let t = random(24, 4);
        let part = equal_split_partition(&t, 3).unwrap();
        let out = strong_structure_pipeline(
            &t,
            &part,
            &Tournament::cyclic_triangle(),
            2,
            r(1, 2),
            r(1, 2),
            CheckMode::Exact,
        )
        .unwrap();
        match out {
            PipelineOutcome::Failed(StageFailure {
                stage: 3,
                embedding: Some(e),
                ..
            }) => {
                assert!(e.validate(&Tournament::cyclic_triangle(), &t));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn exact_matches_brute_force(seed in any::<u64>(), half in 0usize..2, size in 2usize..6) {
            let eps = [r(1, 4), r(1, 2)][half];
            let t = random(2 * size, seed);
            let a: Vec<usize> = (0..size).collect();
            let b: Vec<usize> = (size..2 * size).collect();
            let v = regular_pair_exact(&t, &a, &b, eps).unwrap();
            prop_assert_eq!(v.passed(), brute_regular(&t, &a, &b, eps));
            if let PairVerdict::Fail(ref x) = v {
                prop_assert!(check_violation(&t, &a, &b, eps, x));
            }
        }

        #[test]
        fn sampled_failures_are_real(seed in any::<u64>(), size in 2usize..7) {
            let t = random(2 * size, seed);
            let a: Vec<usize> = (0..size).collect();
            let b: Vec<usize> = (size..2 * size).collect();
            let s = regular_pair_sampled(&t, &a, &b, r(1, 4), 30, seed).unwrap();
            if let PairVerdict::Fail(ref x) = s.verdict {
                prop_assert!(check_violation(&t, &a, &b, r(1, 4), x));
                prop_assert!(!regular_pair_exact(&t, &a, &b, r(1, 4)).unwrap().passed());
            }
        }
    }
}
