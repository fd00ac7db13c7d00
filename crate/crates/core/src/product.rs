//! Product tournaments under placement functions, small stars, and
//! product-form nebulae.
//!
//! A product vertex is identified with the rank of its slot, so every product
//! built here is laid out by the identity ordering.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::containment::Embedding;
use crate::error::{Error, Result};
use crate::stars::{classify_components, StarKind};
use crate::tournament::{Tournament, VertexOrdering};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StarShape {
    Left,
    Right,
    Central,
}

impl StarShape {
    pub const ALL: [StarShape; 3] = [StarShape::Left, StarShape::Right, StarShape::Central];

    /// Index of the center in the default ordering.
    pub fn center_index(self) -> usize {
        match self {
            StarShape::Left => 0,
            StarShape::Right => 2,
            StarShape::Central => 1,
        }
    }

    /// Backward edges `(later, earlier)` of the default ordering `0, 1, 2`.
    pub fn backward_edges(self) -> [(usize, usize); 2] {
        match self {
            StarShape::Left => [(1, 0), (2, 0)],
            StarShape::Right => [(2, 0), (2, 1)],
            StarShape::Central => [(1, 0), (2, 1)],
        }
    }

    pub fn star_kind(self) -> StarKind {
        match self {
            StarShape::Left => StarKind::LeftStar,
            StarShape::Right => StarKind::RightStar,
            StarShape::Central => StarKind::CentralStar,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StarShape::Left => "left",
            StarShape::Right => "right",
            StarShape::Central => "central",
        }
    }
}

impl std::str::FromStr for StarShape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        StarShape::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown star shape `{s}`"))
    }
}

/// The three-vertex star of the given shape, with vertices numbered along its
/// default ordering.
pub fn small_star(shape: StarShape) -> (Tournament, VertexOrdering) {
    let id = VertexOrdering::identity(3);
    let t = Tournament::from_backward_edges(3, &id, &shape.backward_edges())
        .expect("small star edges are backward");
    (t, id)
}

pub fn small_left_star() -> (Tournament, VertexOrdering) {
    small_star(StarShape::Left)
}

pub fn small_right_star() -> (Tournament, VertexOrdering) {
    small_star(StarShape::Right)
}

pub fn small_central_star() -> (Tournament, VertexOrdering) {
    small_star(StarShape::Central)
}

/// Injective map from the vertices of one part to positive slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement(pub Vec<usize>);

impl Placement {
    fn validate(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::invalid(format!(
                "placement covers {} vertices, part has {n}",
                self.0.len()
            )));
        }
        if self.0.contains(&0) {
            return Err(Error::invalid("slots are positive integers"));
        }
        let mut s = self.0.clone();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("placement is not injective"));
        }
        Ok(())
    }
}

/// A product tournament together with where each of its vertices came from.
#[derive(Clone, Debug)]
pub struct Product {
    pub tournament: Tournament,
    /// `(part, vertex in part)` for each product vertex.
    pub origin: Vec<(usize, usize)>,
    /// Slot of each product vertex, increasing.
    pub slots: Vec<usize>,
}

impl Product {
    /// Slot ordering of the product, which is the identity by construction.
    pub fn ordering(&self) -> VertexOrdering {
        VertexOrdering::identity(self.tournament.order())
    }

    /// Product vertex of vertex `v` of part `p`.
    pub fn vertex_of(&self, part: usize, v: usize) -> Option<usize> {
        self.origin.iter().position(|&o| o == (part, v))
    }
}

/// The product of the parts. Edges inside a part are copied; every pair from
/// different parts points from the smaller slot to the larger one.
pub fn product(parts: &[(Tournament, Placement)]) -> Result<Product> {
    let mut all: Vec<(usize, usize, usize)> = Vec::new();
    for (p, (t, f)) in parts.iter().enumerate() {
        f.validate(t.order())?;
        all.extend(f.0.iter().enumerate().map(|(v, &s)| (s, p, v)));
    }
    all.sort_unstable();
    if all.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::invalid("placements of different parts share a slot"));
    }
    let origin: Vec<(usize, usize)> = all.iter().map(|&(_, p, v)| (p, v)).collect();
    let slots = all.iter().map(|&(s, _, _)| s).collect();
    let tournament = Tournament::from_fn(origin.len(), |a, b| {
        let (pa, va) = origin[a];
        let (pb, vb) = origin[b];
        pa != pb || parts[pa].0.beats(va, vb)
    });
    Ok(Product {
        tournament,
        origin,
        slots,
    })
}

/// Small stars of one shape with slots inside `1..=width`. Each entry lists the
/// slots of a star's vertices along its default ordering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementNebula {
    pub kind: StarShape,
    pub stars: Vec<[usize; 3]>,
    pub width: usize,
}

impl PlacementNebula {
    pub fn new(kind: StarShape, stars: Vec<[usize; 3]>, width: usize) -> Result<Self> {
        if stars.is_empty() {
            return Err(Error::invalid("a nebula needs at least one star"));
        }
        let mut used = vec![false; width + 1];
        for (i, s) in stars.iter().enumerate() {
            if !(s[0] < s[1] && s[1] < s[2]) {
                return Err(Error::invalid(format!(
                    "star {i} is not placed along its default ordering: {s:?}"
                )));
            }
            for &x in s {
                if x == 0 || x > width {
                    return Err(Error::invalid(format!("slot {x} outside 1..={width}")));
                }
                if used[x] {
                    return Err(Error::invalid(format!("slot {x} used twice")));
                }
                used[x] = true;
            }
        }
        Ok(PlacementNebula { kind, stars, width })
    }

    pub fn order(&self) -> usize {
        3 * self.stars.len()
    }

    /// Product vertex holding vertex `role` (0, 1, 2 along the default
    /// ordering) of star `star`.
    pub fn vertex(&self, star: usize, role: usize) -> usize {
        let slot = self.stars[star][role];
        self.stars
            .iter()
            .flat_map(|s| s.iter())
            .filter(|&&x| x < slot)
            .count()
    }

    pub fn product(&self) -> Product {
        let (star, _) = small_star(self.kind);
        let parts: Vec<(Tournament, Placement)> = self
            .stars
            .iter()
            .map(|s| (star.clone(), Placement(s.to_vec())))
            .collect();
        product(&parts).expect("validated placements")
    }

    pub fn tournament(&self) -> Tournament {
        self.product().tournament
    }

    /// A seeded random nebula with `stars` stars inside `1..=width`.
    pub fn random(kind: StarShape, stars: usize, width: usize, seed: u64) -> Result<Self> {
        if stars == 0 || 3 * stars > width {
            return Err(Error::invalid("need 1 <= stars and 3 * stars <= width"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut slots: Vec<usize> = (1..=width).collect();
        slots.shuffle(&mut rng);
        slots.truncate(3 * stars);
        let placed = slots
            .chunks(3)
            .map(|c| {
                let mut s = [c[0], c[1], c[2]];
                s.sort_unstable();
                s
            })
            .collect();
        PlacementNebula::new(kind, placed, width)
    }
}

/// Checks placements and builds the product in one step.
pub fn build_nebula(
    kind: StarShape,
    stars: Vec<[usize; 3]>,
    width: usize,
) -> Result<(PlacementNebula, Tournament)> {
    let nebula = PlacementNebula::new(kind, stars, width)?;
    let t = nebula.tournament();
    Ok((nebula, t))
}

/// Completes every component of `B(t, theta)` to a small star of `kind`,
/// producing a product-form nebula that contains `t`.
///
/// The vertex at position `p` gets slot `5p + 3`; fresh leaves use the free
/// slots `5p + 1, 5p + 2` before it or `5p + 4, 5p + 5` after it. Slots are
/// then compressed to `1..=3r`.
pub fn extend_to_product_form(
    t: &Tournament,
    theta: &VertexOrdering,
    kind: StarShape,
) -> Result<(PlacementNebula, Embedding)> {
    let n = t.order();
    if theta.len() != n {
        return Err(Error::invalid("ordering does not match the tournament"));
    }
    let slot = |v: usize| 5 * theta.position(v) + 3;
    let comps = classify_components(&t.backward_edges(theta), theta);
    let mut stars: Vec<[usize; 3]> = Vec::new();
    for c in &comps {
        let s = match (c.kind, c.len()) {
            (StarKind::Singleton, _) => {
                let x = slot(c.center);
                match kind {
                    StarShape::Left => [x, x + 1, x + 2],
                    StarShape::Right => [x - 2, x - 1, x],
                    StarShape::Central => [x - 1, x, x + 1],
                }
            }
            (StarKind::GeneralStar, _) => {
                let (a, b) = (slot(c.vertices[0]), slot(c.vertices[1]));
                match kind {
                    StarShape::Left => [a, a + 1, b],
                    StarShape::Right => [a, b - 1, b],
                    StarShape::Central => [a - 1, a, b],
                }
            }
            (k, 3) if k == kind.star_kind() => [
                slot(c.vertices[0]),
                slot(c.vertices[1]),
                slot(c.vertices[2]),
            ],
            (k, size) => {
                return Err(Error::invalid(format!(
                "component {:?} ({k:?}, {size} vertices) cannot be completed to a small {} star",
                c.vertices,
                kind.name()
            )))
            }
        };
        stars.push(s);
    }
    let mut all: Vec<usize> = stars.iter().flatten().copied().collect();
    all.sort_unstable();
    let rank = |x: usize| all.binary_search(&x).expect("slot present") + 1;
    let compressed: Vec<[usize; 3]> = stars
        .iter()
        .map(|s| [rank(s[0]), rank(s[1]), rank(s[2])])
        .collect();
    let nebula = PlacementNebula::new(kind, compressed, all.len())?;
    let map = (0..n).map(|v| rank(slot(v)) - 1).collect();
    let embedding = Embedding { map };
    if !embedding.validate(t, &nebula.tournament()) {
        return Err(Error::invariant(
            "completed nebula does not contain the input",
        ));
    }
    Ok((nebula, embedding))
}
