//! The phase algorithm that turns a strong structure in a tournament avoiding
//! two product-form nebulae into a large complete pair, and the recursion that
//! turns complete pairs into transitive subtournaments.
//!
//! Every phase colours the 3-subsets of the parts by the trichotomy, picks a
//! monochromatic `k`-subset, and grows one entry of that subset's vector by a
//! vertex triple inducing a small star. The run stops at a complete pair, at a
//! copy of a forbidden nebula pulled out of a saturated vector, or when no
//! monochromatic `k`-subset exists.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::containment::Embedding;
use crate::error::{Error, Result};
use crate::product::{PlacementNebula, StarShape};
use crate::structures::{
    classify_triple, effective_lambda, extract_product, verify_structure, witness_with_pair,
    CompletePair, Extraction, NormalityMap, Rational, TripleVerdict, Witness,
};
use crate::tournament::Tournament;
use crate::transitive::{largest_transitive, stearns_transitive};

/// Largest number of `k`-subsets a configuration may ask for.
pub const MAX_SUBSETS: usize = 200_000;

/// Which two nebula shapes are excluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Lr,
    Lc,
    Rc,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::Lr, Case::Lc, Case::Rc];

    /// Shapes of the first (white) and second (black) nebula.
    pub fn shapes(self) -> (StarShape, StarShape) {
        match self {
            Case::Lr => (StarShape::Left, StarShape::Right),
            Case::Lc => (StarShape::Left, StarShape::Central),
            Case::Rc => (StarShape::Right, StarShape::Central),
        }
    }

    /// Triple classes `(i, j)` that colour an edge white and black.
    pub fn pairs(self) -> ((usize, usize), (usize, usize)) {
        match self {
            Case::Lr => ((1, 0), (1, 2)),
            Case::Lc => ((2, 0), (2, 1)),
            Case::Rc => ((0, 2), (0, 1)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::Lr => "lr",
            Case::Lc => "lc",
            Case::Rc => "rc",
        }
    }
}

impl std::str::FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(Case::Lr),
            "lc" => Ok(Case::Lc),
            "rc" => Ok(Case::Rc),
            _ => Err(Error::invalid(format!(
                "unknown case {s:?}; expected lr, lc or rc"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "color", rename_all = "lowercase")]
pub enum EdgeColor {
    White,
    Black,
    /// The trichotomy produced a complete pair instead; part indices are
    /// those of the whole structure.
    Uncolored {
        pair: CompletePair,
    },
}

/// Colours of all 3-subsets of the parts, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub parts: usize,
    pub edges: Vec<([usize; 3], EdgeColor)>,
}

impl Coloring {
    fn index(&self, e: [usize; 3]) -> usize {
        let t = self.parts;
        let mut rank = 0;
        let mut prev = 0;
        for (pos, &x) in e.iter().enumerate() {
            for y in prev..x {
                rank += binomial(t - y - 1, 2 - pos);
            }
            prev = x + 1;
        }
        rank
    }

    pub fn color(&self, e: [usize; 3]) -> &EdgeColor {
        &self.edges[self.index(e)].1
    }

    pub fn first_uncolored(&self) -> Option<&CompletePair> {
        self.edges.iter().find_map(|(_, c)| match c {
            EdgeColor::Uncolored { pair } => Some(pair),
            _ => None,
        })
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut w = (0, 0, 0);
        for (_, c) in &self.edges {
            match c {
                EdgeColor::White => w.0 += 1,
                EdgeColor::Black => w.1 += 1,
                EdgeColor::Uncolored { .. } => w.2 += 1,
            }
        }
        w
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(usize::MAX as u128) as usize
}

/// All `k`-subsets of `0..t` in lexicographic order.
pub fn k_subsets(t: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > t {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < t - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for q in i + 1..k {
            cur[q] = cur[q - 1] + 1;
        }
    }
}

fn globalize(pair: CompletePair, parts: [usize; 3]) -> CompletePair {
    CompletePair {
        from_part: parts[pair.from_part],
        to_part: parts[pair.to_part],
        ..pair
    }
}

/// Colours every 3-subset `{a < b < c}` of the parts by classifying
/// `(S_a, S_b, S_c)` with the case's white pair.
pub fn color_hyperedges(t: &Tournament, sets: &[Vec<usize>], case: Case) -> Result<Coloring> {
    if let Some(q) = sets.iter().position(|s| s.is_empty()) {
        return Err(Error::invalid(format!("part {q} is empty")));
    }
    let ((i, j), black) = case.pairs();
    let mut edges = Vec::new();
    for e in k_subsets(sets.len(), 3) {
        let parts = [e[0], e[1], e[2]];
        let triple: Vec<Vec<usize>> = parts.iter().map(|&p| sets[p].clone()).collect();
        let color = match classify_triple(t, &triple, i, j)? {
            TripleVerdict::CompletePair(pair) => EdgeColor::Uncolored {
                pair: globalize(pair, parts),
            },
            v if v.pair() == Some((i, j)) => EdgeColor::White,
            v if v.pair() == Some(black) => EdgeColor::Black,
            v => {
                return Err(Error::invariant(format!(
                    "unexpected classification {:?}",
                    v.pair()
                )))
            }
        };
        edges.push((parts, color));
    }
    Ok(Coloring {
        parts: sets.len(),
        edges,
    })
}

/// The lexicographically least `k`-subset whose 3-subsets all share a colour.
/// A subset that could take either colour (fewer than three elements) is white.
pub fn find_monochromatic_clique(
    coloring: &Coloring,
    k: usize,
) -> Result<Option<(Vec<usize>, Color)>> {
    if coloring.first_uncolored().is_some() {
        return Err(Error::invalid("every edge must be coloured"));
    }
    for subset in k_subsets(coloring.parts, k) {
        let mut colors = k_subsets(subset.len(), 3)
            .into_iter()
            .map(|e| coloring.color([subset[e[0]], subset[e[1]], subset[e[2]]]));
        let first = match colors.next() {
            None => return Ok(Some((subset, Color::White))),
            Some(c) => c.clone(),
        };
        if colors.all(|c| *c == first) {
            let color = if first == EdgeColor::White {
                Color::White
            } else {
                Color::Black
            };
            return Ok(Some((subset, color)));
        }
    }
    Ok(None)
}

/// Parameters of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub case: Case,
    /// Nebula matching the white colour.
    pub first: PlacementNebula,
    /// Nebula matching the black colour.
    pub second: PlacementNebula,
    /// Slot width shared by both nebulae.
    pub k: usize,
    /// Number of parts.
    pub t: usize,
    /// Size of every part.
    pub w: usize,
    pub lambda: Rational,
    pub c: Rational,
}

impl AlgorithmConfig {
    pub fn new(
        case: Case,
        first: PlacementNebula,
        second: PlacementNebula,
        t: usize,
        w: usize,
        lambda: Rational,
        c: Rational,
    ) -> Result<Self> {
        let (a, b) = case.shapes();
        if first.kind != a || second.kind != b {
            return Err(Error::invalid(format!(
                "case {} needs a {} and a {} nebula",
                case.name(),
                a.name(),
                b.name()
            )));
        }
        let k = first.width.max(second.width);
        if k == 0 || t < k {
            return Err(Error::invalid(format!(
                "need t >= k >= 1, got t = {t}, k = {k}"
            )));
        }
        if w == 0 {
            return Err(Error::invalid("parts must be nonempty"));
        }
        let subsets = binomial(t, k);
        if subsets > MAX_SUBSETS {
            return Err(Error::BudgetExceeded {
                what: "k-subsets",
                size: subsets,
                limit: MAX_SUBSETS,
            });
        }
        Ok(AlgorithmConfig {
            case,
            first: PlacementNebula { width: k, ..first },
            second: PlacementNebula { width: k, ..second },
            k,
            t,
            w,
            lambda,
            c,
        })
    }

    /// One star of each shape on slots `1, 2, 3`.
    pub fn single_stars(
        case: Case,
        t: usize,
        w: usize,
        lambda: Rational,
        c: Rational,
    ) -> Result<Self> {
        let (a, b) = case.shapes();
        let first = PlacementNebula::new(a, vec![[1, 2, 3]], 3)?;
        let second = PlacementNebula::new(b, vec![[1, 2, 3]], 3)?;
        AlgorithmConfig::new(case, first, second, t, w, lambda, c)
    }

    pub fn subsets(&self) -> usize {
        binomial(self.t, self.k)
    }

    /// `ceil(W / (9 k C(t, k)))`.
    pub fn capacity(&self) -> usize {
        self.w.div_ceil(9 * self.k * self.subsets())
    }

    /// `2 k C(t, k) capacity`.
    pub fn phase_bound(&self) -> usize {
        2 * self.k * self.subsets() * self.capacity()
    }

    /// `W/3 - 6 k C(t, k)`.
    pub fn size_floor(&self) -> Rational {
        Rational::new(self.w as i64, 3)
            - Rational::from_integer((6 * self.k * self.subsets()) as i64)
    }

    /// `max(1, W/6 - 3 k C(t, k))`.
    pub fn pair_bound(&self) -> Rational {
        let b = Rational::new(self.w as i64, 6)
            - Rational::from_integer((3 * self.k * self.subsets()) as i64);
        b.max(Rational::from_integer(1))
    }

    /// `1 / (3 k C(t, k))`.
    pub fn theta(&self) -> Rational {
        Rational::new(1, (3 * self.k * self.subsets()) as i64)
    }

    /// The bound on `lambda` that makes saturation impossible for a free
    /// host, with `t` in place of the hypergraph Ramsey number. Factors
    /// `(count - 1)^2` are taken as at least 1.
    pub fn lambda_threshold(&self) -> Rational {
        let f = |n: &PlacementNebula| {
            let m = (n.stars.len() as i64 - 1).max(1);
            m * m * 9
        };
        Rational::new(
            1,
            3 * (self.k * self.subsets()) as i64 * f(&self.first) * f(&self.second),
        )
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.lambda >= self.lambda_threshold() {
            out.push(format!(
                "lambda {} is not below {}; saturation is not ruled out",
                self.lambda,
                self.lambda_threshold()
            ));
        }
        if self.size_floor() <= Rational::from_integer(0) {
            out.push("W/3 - 6k C(t,k) is not positive; part sizes are not protected".into());
        }
        out
    }

    fn nebula(&self, color: Color) -> &PlacementNebula {
        match color {
            Color::White => &self.first,
            Color::Black => &self.second,
        }
    }

    fn pair(&self, color: Color) -> (usize, usize) {
        match color {
            Color::White => self.case.pairs().0,
            Color::Black => self.case.pairs().1,
        }
    }
}

/// Current parts and the per-subset vectors of stored triples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseState {
    pub phase: usize,
    pub initial: Vec<Vec<usize>>,
    pub sets: Vec<Vec<usize>>,
    pub subsets: Vec<Vec<usize>>,
    /// `white[s][star]`: triples stored for star `star` of the first nebula
    /// under subset `s`.
    pub white: Vec<Vec<Vec<[usize; 3]>>>,
    pub black: Vec<Vec<Vec<[usize; 3]>>>,
}

impl PhaseState {
    pub fn new(parts: &[Vec<usize>], config: &AlgorithmConfig) -> Self {
        let subsets = k_subsets(config.t, config.k);
        let empty = |n: &PlacementNebula| vec![vec![Vec::new(); n.stars.len()]; subsets.len()];
        PhaseState {
            phase: 0,
            initial: parts.to_vec(),
            sets: parts.to_vec(),
            white: empty(&config.first),
            black: empty(&config.second),
            subsets,
        }
    }

    pub fn vector(&self, color: Color, subset: usize) -> &[Vec<[usize; 3]>] {
        match color {
            Color::White => &self.white[subset],
            Color::Black => &self.black[subset],
        }
    }

    fn vector_mut(&mut self, color: Color, subset: usize) -> &mut Vec<Vec<[usize; 3]>> {
        match color {
            Color::White => &mut self.white[subset],
            Color::Black => &mut self.black[subset],
        }
    }

    pub fn stored(&self) -> usize {
        self.white
            .iter()
            .chain(&self.black)
            .flatten()
            .map(|e| e.len())
            .sum()
    }

    /// Re-checks every property the proof keeps: stored triples induce the
    /// right small star inside the prescribed parts, entries respect the
    /// capacity, triples are disjoint, the removed vertices are exactly the
    /// stored ones, and no part drops below the size floor.
    pub fn check(&self, t: &Tournament, config: &AlgorithmConfig) -> Result<()> {
        let cap = config.capacity();
        let n = t.order();
        let mut owner = vec![usize::MAX; n];
        for (q, part) in self.initial.iter().enumerate() {
            for &v in part {
                owner[v] = q;
            }
        }
        let mut stored = vec![false; n];
        for color in [Color::White, Color::Black] {
            let nebula = config.nebula(color);
            for (s, subset) in self.subsets.iter().enumerate() {
                for (star, entry) in self.vector(color, s).iter().enumerate() {
                    if entry.len() > cap {
                        return Err(Error::invariant(format!(
                            "entry ({s}, {star}) holds {} triples, capacity {cap}",
                            entry.len()
                        )));
                    }
                    for triple in entry {
                        for (role, &v) in triple.iter().enumerate() {
                            let want = subset[nebula.stars[star][role] - 1];
                            if owner[v] != want {
                                return Err(Error::invariant(format!(
                                    "vertex {v} of a stored triple is not in part {want}"
                                )));
                            }
                            if std::mem::replace(&mut stored[v], true) {
                                return Err(Error::invariant(format!(
                                    "vertex {v} is stored twice"
                                )));
                            }
                        }
                        let pattern = nebula.kind.triple_pattern();
                        if !pattern.iter().all(|&(a, b)| t.beats(triple[a], triple[b])) {
                            return Err(Error::invariant(format!(
                                "stored triple {triple:?} is not a small {} star",
                                nebula.kind.name()
                            )));
                        }
                    }
                }
            }
        }
        let floor = config.size_floor();
        for (q, (now, before)) in self.sets.iter().zip(&self.initial).enumerate() {
            let mut expect: Vec<usize> = before.iter().copied().filter(|&v| !stored[v]).collect();
            let mut have = now.clone();
            expect.sort_unstable();
            have.sort_unstable();
            if expect != have {
                return Err(Error::invariant(format!(
                    "part {q} lost vertices that are not stored"
                )));
            }
            if Rational::from_integer(now.len() as i64) < floor {
                return Err(Error::invariant(format!(
                    "part {q} fell below the size floor"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    /// `state` is 0 when an uncoloured edge gave the pair and 2 when a witness
    /// search did.
    CompletePair {
        state: u8,
        pair: CompletePair,
    },
    /// A copy of the forbidden nebula of colour `color`, built from the
    /// saturated vector of subset `subset`.
    ForbiddenCopy {
        color: Color,
        subset: usize,
        embedding: Embedding,
    },
    /// A vector saturated but no copy could be extracted; `reason` names the
    /// hypothesis that failed.
    SaturationUnresolved {
        color: Color,
        subset: usize,
        reason: String,
    },
    NoMonochromaticClique,
    PhaseLimitExceeded {
        phases: usize,
    },
}

/// One line of the audit trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub phase: usize,
    pub action: String,
    pub payload: serde_json::Value,
}

fn record(trace: &mut Vec<TraceRecord>, phase: usize, action: &str, payload: serde_json::Value) {
    trace.push(TraceRecord {
        phase,
        action: action.to_string(),
        payload,
    });
}

/// Runs one phase. Returns `None` when a triple was stored and the run
/// should continue.
pub fn run_phase(
    t: &Tournament,
    state: &mut PhaseState,
    config: &AlgorithmConfig,
    trace: &mut Vec<TraceRecord>,
) -> Result<Option<Outcome>> {
    let phase = state.phase;
    let coloring = color_hyperedges(t, &state.sets, config.case)?;
    let (white, black, uncolored) = coloring.counts();
    record(
        trace,
        phase,
        "color",
        json!({"white": white, "black": black, "uncolored": uncolored}),
    );
    if let Some(pair) = coloring.first_uncolored() {
        record(
            trace,
            phase,
            "state0",
            json!({"from_part": pair.from_part, "to_part": pair.to_part}),
        );
        return Ok(Some(Outcome::CompletePair {
            state: 0,
            pair: pair.clone(),
        }));
    }
    let Some((clique, color)) = find_monochromatic_clique(&coloring, config.k)? else {
        record(trace, phase, "no_clique", json!(null));
        return Ok(Some(Outcome::NoMonochromaticClique));
    };
    let subset = state
        .subsets
        .iter()
        .position(|s| *s == clique)
        .expect("clique is a k-subset");
    record(
        trace,
        phase,
        "clique",
        json!({"subset": clique, "color": color}),
    );
    let cap = config.capacity();
    let Some(star) = state
        .vector(color, subset)
        .iter()
        .position(|e| e.len() < cap)
    else {
        record(
            trace,
            phase,
            "saturated",
            json!({"subset": subset, "color": color}),
        );
        let outcome = nonsaturation_extract(t, state, config, subset, color)?;
        record(
            trace,
            phase,
            "extract",
            serde_json::to_value(&outcome).expect("serializable"),
        );
        return Ok(Some(outcome));
    };
    let nebula = config.nebula(color);
    let parts = nebula.stars[star].map(|slot| clique[slot - 1]);
    let triple: Vec<Vec<usize>> = parts.iter().map(|&p| state.sets[p].clone()).collect();
    let (i, j) = config.pair(color);
    match witness_with_pair(t, &triple, nebula.kind, i, j)? {
        Witness::Vertices { vertices } => {
            record(
                trace,
                phase,
                "store",
                json!({"subset": subset, "color": color, "star": star, "parts": parts, "vertices": vertices}),
            );
            state.vector_mut(color, subset)[star].push(vertices);
            for (&p, v) in parts.iter().zip(vertices) {
                state.sets[p].retain(|&x| x != v);
            }
            state.phase += 1;
            Ok(None)
        }
        Witness::Pair(pair) => {
            let pair = globalize(pair, parts);
            record(
                trace,
                phase,
                "state2",
                json!({"from_part": pair.from_part, "to_part": pair.to_part}),
            );
            Ok(Some(Outcome::CompletePair { state: 2, pair }))
        }
    }
}

/// Builds the structure of stored vertices of a saturated vector and extracts
/// a copy of the matching nebula from it.
pub fn nonsaturation_extract(
    t: &Tournament,
    state: &PhaseState,
    config: &AlgorithmConfig,
    subset: usize,
    color: Color,
) -> Result<Outcome> {
    let cap = config.capacity();
    let vector = state.vector(color, subset);
    if vector.iter().any(|e| e.len() < cap) {
        return Err(Error::invalid("the vector has an unsaturated entry"));
    }
    let nebula = config.nebula(color);
    let k = config.k;
    let mut slots_used = vec![None; k];
    for (star, slots) in nebula.stars.iter().enumerate() {
        for (role, &slot) in slots.iter().enumerate() {
            slots_used[slot - 1] = Some((star, role));
        }
    }
    // u_1 < ... < u_m: the slots holding stored vertices
    let used: Vec<usize> = (0..k).filter(|&q| slots_used[q].is_some()).collect();
    let parts: Vec<Vec<usize>> = used
        .iter()
        .map(|&q| {
            let (star, role) = slots_used[q].expect("used slot");
            vector[star].iter().map(|tr| tr[role]).collect()
        })
        .collect();
    let maps: Vec<NormalityMap> = nebula
        .stars
        .iter()
        .enumerate()
        .map(|(star, slots)| NormalityMap {
            pattern: crate::product::small_star(nebula.kind).0,
            phi: slots
                .iter()
                .map(|&s| used.iter().position(|&q| q == s - 1).expect("used"))
                .collect(),
            rows: vector[star].iter().map(|tr| tr.to_vec()).collect(),
        })
        .collect();
    let theta = config.theta();
    let lambda = config.lambda / theta;
    let cert = verify_structure(t, &parts, config.c * theta, lambda, true, None)?;
    let report = extract_product(t, &parts, lambda, &maps)?;
    match report.outcome {
        Extraction::Embedding { embedding, .. } => {
            if !embedding.validate(&nebula.tournament(), t) {
                return Err(Error::invariant(
                    "extracted copy does not match the forbidden nebula",
                ));
            }
            Ok(Outcome::ForbiddenCopy {
                color,
                subset,
                embedding,
            })
        }
        other => {
            let mut reasons = Vec::new();
            if !cert.passed {
                reasons.push(format!(
                    "stored vertices do not form a strong (c theta, lambda / theta)-structure ({} violations)",
                    cert.violations.len()
                ));
            }
            if other == Extraction::LambdaTooLarge {
                reasons.push(format!(
                    "lambda / theta = {lambda} is not below {}",
                    report.lambda_threshold.unwrap_or_default()
                ));
            }
            if reasons.is_empty() {
                reasons.push("no compatible rows although the structure verifies".into());
            }
            Ok(Outcome::SaturationUnresolved {
                color,
                subset,
                reason: reasons.join("; "),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub outcome: Outcome,
    /// Phases that stored a triple.
    pub phases: usize,
    pub phase_bound: usize,
    pub capacity: usize,
    /// Triples stored in vectors when the run stopped.
    pub stored: usize,
    pub warnings: Vec<String>,
    pub trace: Vec<TraceRecord>,
}

/// Runs phases until an outcome is reached. The state invariants are
/// re-checked after every phase.
pub fn run(t: &Tournament, parts: &[Vec<usize>], config: &AlgorithmConfig) -> Result<RunReport> {
    if parts.len() != config.t {
        return Err(Error::invalid(format!(
            "expected {} parts, got {}",
            config.t,
            parts.len()
        )));
    }
    if parts.iter().any(|p| p.len() != config.w) {
        return Err(Error::invalid(format!(
            "every part must have {} vertices",
            config.w
        )));
    }
    let cert = verify_structure(t, parts, config.c, config.lambda, true, None)?;
    if !cert.passed {
        return Err(Error::invalid(format!(
            "initial parts are not a strong ({}, {})-structure: {:?}",
            config.c, config.lambda, cert.violations[0]
        )));
    }
    let mut trace = Vec::new();
    record(
        &mut trace,
        0,
        "start",
        json!({
            "case": config.case, "k": config.k, "t": config.t, "w": config.w,
            "capacity": config.capacity(), "phase_bound": config.phase_bound(),
            "lambda": config.lambda.to_string(), "c": config.c.to_string(),
        }),
    );
    let mut state = PhaseState::new(parts, config);
    let bound = config.phase_bound();
    let outcome = loop {
        if state.phase > bound {
            break Outcome::PhaseLimitExceeded {
                phases: state.phase,
            };
        }
        let step = run_phase(t, &mut state, config, &mut trace)?;
        state.check(t, config)?;
        if let Some(outcome) = step {
            break outcome;
        }
    };
    validate_outcome(t, config, &outcome)?;
    Ok(RunReport {
        outcome,
        phases: state.phase,
        phase_bound: bound,
        capacity: config.capacity(),
        stored: state.stored(),
        warnings: config.warnings(),
        trace,
    })
}

/// Independent re-check of an outcome's payload.
pub fn validate_outcome(t: &Tournament, config: &AlgorithmConfig, outcome: &Outcome) -> Result<()> {
    match outcome {
        Outcome::CompletePair { pair, .. } => {
            if !pair.validate(t) {
                return Err(Error::invariant("reported pair is not complete"));
            }
            let floor = config.pair_bound();
            if floor > Rational::from_integer(1)
                && Rational::from_integer(pair.min_side() as i64) < floor
            {
                return Err(Error::invariant("reported pair is below the size bound"));
            }
            Ok(())
        }
        Outcome::ForbiddenCopy {
            color, embedding, ..
        } => {
            if embedding.validate(&config.nebula(*color).tournament(), t) {
                Ok(())
            } else {
                Err(Error::invariant("reported copy is not induced"))
            }
        }
        _ => Ok(()),
    }
}

/// Union of transitive sets of `T|A` and `T|B` when `A` is complete to `B`,
/// listed from source to sink. Inputs are lists of host vertices.
pub fn eh_induction_step(
    t: &Tournament,
    pair: &CompletePair,
    in_a: &[usize],
    in_b: &[usize],
) -> Result<Vec<usize>> {
    if !pair.validate(t) {
        return Err(Error::invalid("pair is not complete"));
    }
    if !in_a.iter().all(|v| pair.from.contains(v)) || !in_b.iter().all(|v| pair.to.contains(v)) {
        return Err(Error::invalid("transitive sets must lie in their sides"));
    }
    let mut a = t
        .transitive_order(in_a)
        .ok_or_else(|| Error::invalid("first set is not transitive"))?;
    let b = t
        .transitive_order(in_b)
        .ok_or_else(|| Error::invalid("second set is not transitive"))?;
    a.extend(b);
    Ok(a)
}

/// Consecutive blocks of `w` vertices of `order`, `parts` of them.
fn blocks(order: &[usize], parts: usize, w: usize) -> Vec<Vec<usize>> {
    order.chunks(w).take(parts).map(|c| c.to_vec()).collect()
}

/// Looks for `parts` equal blocks forming a strong structure with the least
/// `lambda` among a few candidate vertex orders: by decreasing score, the
/// identity, and `tries` seeded shuffles.
pub fn find_block_structure(
    t: &Tournament,
    parts: usize,
    tries: usize,
    seed: u64,
) -> Result<Option<(Vec<Vec<usize>>, Rational)>> {
    let n = t.order();
    if parts == 0 || n < parts {
        return Ok(None);
    }
    let w = n / parts;
    let mut by_score: Vec<usize> = (0..n).collect();
    by_score.sort_by_key(|&v| (std::cmp::Reverse(t.out_degree(v)), v));
    let mut candidates = vec![by_score, (0..n).collect::<Vec<_>>()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..tries {
        let mut o: Vec<usize> = (0..n).collect();
        o.shuffle(&mut rng);
        candidates.push(o);
    }
    let mut best: Option<(Vec<Vec<usize>>, Rational)> = None;
    for order in candidates {
        let b = blocks(&order, parts, w);
        let lambda = effective_lambda(t, &b, true)?;
        if best.as_ref().is_none_or(|(_, l)| lambda < *l) {
            best = Some((b, lambda));
        }
    }
    Ok(best)
}

/// Options for the recursive extraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EhParams {
    pub case: Case,
    pub first: PlacementNebula,
    pub second: PlacementNebula,
    pub t: usize,
    /// Below this order the recursion solves exactly (or by the majority
    /// construction if the exact solver's budget is exceeded).
    pub base: usize,
    /// Structures with a larger `lambda` are not used.
    pub max_lambda: Rational,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EhResult {
    /// Host vertices, source to sink.
    pub vertices: Vec<usize>,
    /// Runs that ended in a complete pair and were split.
    pub splits: usize,
    /// Subproblems solved directly at or below the base size.
    pub leaves: usize,
    /// Subproblems above the base size where no split was available.
    pub fallbacks: usize,
}

/// Transitive subtournament built by splitting along complete pairs found by
/// [`run`], solving small pieces directly.
pub fn eh_transitive(t: &Tournament, params: &EhParams) -> Result<EhResult> {
    let all: Vec<usize> = (0..t.order()).collect();
    let mut out = EhResult {
        vertices: Vec::new(),
        splits: 0,
        leaves: 0,
        fallbacks: 0,
    };
    out.vertices = eh_rec(t, &all, params, params.seed, &mut out)?;
    if t.transitive_order(&out.vertices).as_ref() != Some(&out.vertices) {
        return Err(Error::invariant("recursion produced a non-transitive set"));
    }
    Ok(out)
}

fn direct(sub: &Tournament) -> Vec<usize> {
    match largest_transitive(sub) {
        Ok(s) => sub.transitive_order(&s).expect("transitive"),
        Err(_) => stearns_transitive(sub),
    }
}

fn eh_rec(
    t: &Tournament,
    vs: &[usize],
    params: &EhParams,
    seed: u64,
    acc: &mut EhResult,
) -> Result<Vec<usize>> {
    let sub = t.induced(vs)?;
    let lift = |local: Vec<usize>| local.into_iter().map(|x| vs[x]).collect::<Vec<_>>();
    if vs.len() <= params.base.max(params.t) {
        acc.leaves += 1;
        return Ok(lift(direct(&sub)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempt = || -> Result<Option<CompletePair>> {
        let Some((parts, lambda)) = find_block_structure(&sub, params.t, 4, seed)? else {
            return Ok(None);
        };
        if lambda > params.max_lambda {
            return Ok(None);
        }
        let w = parts[0].len();
        let c = Ratio::new(w as i64, sub.order() as i64);
        let config = AlgorithmConfig::new(
            params.case,
            params.first.clone(),
            params.second.clone(),
            params.t,
            w,
            lambda,
            c,
        )?;
        Ok(match run(&sub, &parts, &config)?.outcome {
            Outcome::CompletePair { pair, .. } => Some(pair),
            _ => None,
        })
    };
    let Some(pair) = attempt()? else {
        acc.fallbacks += 1;
        return Ok(lift(direct(&sub)));
    };
    acc.splits += 1;
    let a: Vec<usize> = pair.from.iter().map(|&x| vs[x]).collect();
    let b: Vec<usize> = pair.to.iter().map(|&x| vs[x]).collect();
    let ta = eh_rec(t, &a, params, rng.gen(), acc)?;
    let tb = eh_rec(t, &b, params, rng.gen(), acc)?;
    let lifted = CompletePair {
        from: a,
        to: b,
        ..pair
    };
    eh_induction_step(t, &lifted, &ta, &tb)
}

/// A host of `parts` blocks of `w` vertices: edges inside a block are fair
/// coin flips, edges between blocks point backward with probability
/// `backward`. The blocks are returned alongside.
pub fn block_host(
    parts: usize,
    w: usize,
    backward: f64,
    seed: u64,
) -> (Tournament, Vec<Vec<usize>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = parts * w;
    let t = Tournament::from_fn(n, |u, v| {
        if u / w == v / w {
            rng.gen::<bool>()
        } else {
            !rng.gen_bool(backward)
        }
    });
    let blocks = (0..parts).map(|p| (p * w..(p + 1) * w).collect()).collect();
    (t, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::containment::contains;
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn config(case: Case, t: usize, w: usize, lambda: Rational) -> AlgorithmConfig {
        AlgorithmConfig::single_stars(case, t, w, lambda, r(1, t as i64)).unwrap()
    }

    #[test]
    fn capacity_and_bounds() {
        let c = config(Case::Lr, 7, 30, r(1, 2));
        assert_eq!(c.subsets(), 35);
        assert_eq!(c.capacity(), 1);
        assert_eq!(c.phase_bound(), 210);
        assert_eq!(c.theta(), r(1, 315));
        assert_eq!(c.pair_bound(), r(1, 1));
        assert!(!c.warnings().is_empty());
    }

    #[test]
    fn config_rejects_mismatched_shapes() {
        let l = PlacementNebula::new(StarShape::Left, vec![[1, 2, 3]], 3).unwrap();
        assert!(
            AlgorithmConfig::new(Case::Rc, l.clone(), l.clone(), 5, 4, r(0, 1), r(1, 5)).is_err()
        );
        let rr = PlacementNebula::new(StarShape::Right, vec![[1, 2, 3]], 3).unwrap();
        assert!(AlgorithmConfig::new(Case::Lr, l, rr, 2, 4, r(0, 1), r(1, 5)).is_err());
    }

    #[test]
    fn subsets_in_order() {
        assert_eq!(k_subsets(4, 2).len(), 6);
        assert_eq!(k_subsets(4, 2)[0], vec![0, 1]);
        assert_eq!(k_subsets(4, 2)[5], vec![2, 3]);
        assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(k_subsets(2, 3).is_empty());
        for t in 3..8 {
            let c = Coloring {
                parts: t,
                edges: k_subsets(t, 3)
                    .into_iter()
                    .map(|e| ([e[0], e[1], e[2]], EdgeColor::White))
                    .collect(),
            };
            for (i, (e, _)) in c.edges.iter().enumerate() {
                assert_eq!(c.index(*e), i);
            }
        }
    }

    #[test]
    fn forward_blocks_give_state_zero() {
        let (t, parts) = block_host(4, 6, 0.0, 1);
        let cfg = config(Case::Lr, 4, 6, r(0, 1));
        let rep = run(&t, &parts, &cfg).unwrap();
        let Outcome::CompletePair { state: 0, pair } = &rep.outcome else {
            panic!("expected state 0, got {:?}", rep.outcome)
        };
        assert!(pair.validate(&t));
        assert_eq!(rep.phases, 0);
    }

    #[test]
    fn full_backward_blocks_color_every_edge() {
        let (t, parts) = block_host(5, 4, 1.0, 2);
        for case in Case::ALL {
            let c = color_hyperedges(&t, &parts, case).unwrap();
            assert_eq!(c.counts().2, 0);
        }
    }

    fn engineered(t: usize, f: impl Fn([usize; 3]) -> bool) -> Coloring {
        Coloring {
            parts: t,
            edges: k_subsets(t, 3)
                .into_iter()
                .map(|e| {
                    let e = [e[0], e[1], e[2]];
                    (
                        e,
                        if f(e) {
                            EdgeColor::White
                        } else {
                            EdgeColor::Black
                        },
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn monochromatic_cliques() {
        let all_white = engineered(6, |_| true);
        assert_eq!(
            find_monochromatic_clique(&all_white, 4).unwrap(),
            Some((vec![0, 1, 2, 3], Color::White))
        );
        let all_black = engineered(6, |_| false);
        assert_eq!(
            find_monochromatic_clique(&all_black, 3).unwrap(),
            Some((vec![0, 1, 2], Color::Black))
        );
        // White iff the subset sum is even: every 4-subset of 0..5 mixes.
        let parity = engineered(5, |e| (e[0] + e[1] + e[2]) % 2 == 0);
        assert_eq!(find_monochromatic_clique(&parity, 4).unwrap(), None);
        assert_eq!(
            find_monochromatic_clique(&parity, 2).unwrap().unwrap().1,
            Color::White
        );
    }

    #[test]
    fn no_clique_is_terminal() {
        let parity = engineered(5, |e| (e[0] + e[1] + e[2]) % 2 == 0);
        assert!(find_monochromatic_clique(&parity, 5).unwrap().is_none());
    }

    #[test]
    fn uncoloured_edges_block_clique_search() {
        let mut c = engineered(4, |_| true);
        c.edges[0].1 = EdgeColor::Uncolored {
            pair: CompletePair {
                from: vec![0],
                to: vec![1],
                from_part: 0,
                to_part: 1,
            },
        };
        assert!(find_monochromatic_clique(&c, 3).is_err());
    }

    /// Three parts of `w` vertices, every cross edge pointing backward except
    /// `w -> 2w`, which makes `(0, w, 2w)` the only left pattern triple
    /// through vertex `w`.
    fn one_forward(w: usize) -> (Tournament, Vec<Vec<usize>>) {
        let t = Tournament::from_fn(3 * w, |u, v| u / w == v / w || (u, v) == (w, 2 * w));
        (t, (0..3).map(|p| (p * w..(p + 1) * w).collect()).collect())
    }

    #[test]
    fn single_phase_stores_one_triple() {
        let (t, parts) = one_forward(4);
        let cfg = config(Case::Lr, 3, 4, effective_lambda(&t, &parts, true).unwrap());
        let coloring = color_hyperedges(&t, &parts, Case::Lr).unwrap();
        assert_eq!(coloring.counts(), (1, 0, 0));
        let mut state = PhaseState::new(&parts, &cfg);
        let mut trace = Vec::new();
        assert!(run_phase(&t, &mut state, &cfg, &mut trace)
            .unwrap()
            .is_none());
        assert_eq!(state.white[0][0], vec![[0, 4, 8]]);
        assert_eq!(state.sets.iter().map(|s| s.len()).sum::<usize>(), 9);
        state.check(&t, &cfg).unwrap();
    }

    #[test]
    fn saturated_vector_hands_off_to_extraction() {
        let (t, parts) = one_forward(4);
        let cfg = config(Case::Lr, 3, 4, effective_lambda(&t, &parts, true).unwrap());
        let fresh = PhaseState::new(&parts, &cfg);
        assert!(nonsaturation_extract(&t, &fresh, &cfg, 0, Color::White).is_err());
        let rep = run(&t, &parts, &cfg).unwrap();
        assert_eq!(rep.phases, 1);
        assert!(rep.trace.iter().any(|r| r.action == "saturated"));
        let Outcome::ForbiddenCopy {
            color: Color::White,
            embedding,
            ..
        } = &rep.outcome
        else {
            panic!("expected a copy, got {:?}", rep.outcome)
        };
        assert_eq!(embedding.map, vec![0, 4, 8]);
    }

    #[test]
    fn random_runs_respect_the_bound() {
        let (t, parts) = block_host(3, 6, 0.9, 11);
        let cfg = config(Case::Lr, 3, 6, effective_lambda(&t, &parts, true).unwrap());
        let rep = run(&t, &parts, &cfg).unwrap();
        assert!(rep.phases <= rep.phase_bound);
        validate_outcome(&t, &cfg, &rep.outcome).unwrap();
    }

    #[test]
    fn induction_step_concatenates() {
        let t = Tournament::transitive(4);
        let pair = CompletePair {
            from: vec![0, 1],
            to: vec![2, 3],
            from_part: 0,
            to_part: 1,
        };
        assert_eq!(
            eh_induction_step(&t, &pair, &[1, 0], &[3, 2]).unwrap(),
            vec![0, 1, 2, 3]
        );
        let two = CompletePair {
            from: vec![0],
            to: vec![3],
            from_part: 0,
            to_part: 1,
        };
        assert_eq!(eh_induction_step(&t, &two, &[0], &[3]).unwrap(), vec![0, 3]);
    }

    #[test]
    fn recursion_on_a_block_host() {
        let (t, _) = block_host(6, 10, 0.05, 3);
        let params = EhParams {
            case: Case::Lr,
            first: PlacementNebula::new(StarShape::Left, vec![[1, 2, 3]], 3).unwrap(),
            second: PlacementNebula::new(StarShape::Right, vec![[1, 2, 3]], 3).unwrap(),
            t: 4,
            base: 12,
            max_lambda: r(1, 1),
            seed: 9,
        };
        let res = eh_transitive(&t, &params).unwrap();
        assert!(t.is_transitive_set(&res.vertices));
        assert!(res.splits >= 1);
        assert!(res.vertices.len() >= crate::transitive::stearns_bound(60));
    }

    #[test]
    fn runs_are_deterministic() {
        let (t, parts) = block_host(7, 30, 0.5, 21);
        let lambda = effective_lambda(&t, &parts, true).unwrap();
        let cfg = config(Case::Lc, 7, 30, lambda);
        assert_eq!(
            run(&t, &parts, &cfg).unwrap(),
            run(&t, &parts, &cfg).unwrap()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn runs_end_with_valid_outcomes(seed in any::<u64>(), case_i in 0usize..3, p in 0.0f64..1.0) {
            let case = Case::ALL[case_i];
            let (t, parts) = block_host(5, 8, p, seed);
            let lambda = effective_lambda(&t, &parts, true).unwrap();
            let cfg = config(case, 5, 8, lambda);
            let rep = run(&t, &parts, &cfg).unwrap();
            prop_assert!(rep.phases <= rep.phase_bound);
            prop_assert_eq!(rep.stored, rep.phases);
            match &rep.outcome {
                Outcome::CompletePair { pair, .. } => prop_assert!(pair.validate(&t)),
                Outcome::ForbiddenCopy { color, embedding, .. } => {
                    let h = cfg.nebula(*color).tournament();
                    prop_assert!(embedding.validate(&h, &t));
                    prop_assert!(contains(&t, &h).is_some());
                }
                _ => {}
            }
        }
    }
}
