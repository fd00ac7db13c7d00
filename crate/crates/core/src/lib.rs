//! Tournaments, nebulae, product tournaments, and the machinery for extracting
//! large transitive subtournaments from tournaments that avoid a pair of
//! nebulae.

pub mod algorithm;
pub mod audit;
mod bits;
pub mod budget;
pub mod canon;
pub mod cli;
pub mod containment;
pub mod error;
pub mod examples;
pub mod graph;
pub mod io;
pub mod modules;
pub mod product;
pub mod regularity;
pub mod report;
pub mod stars;
pub mod structures;
pub mod tournament;
pub mod transitive;

pub use canon::{canonical_form, enumerate_tournaments, isomorphic, CanonicalForm};
pub use error::{Error, Result};
pub use modules::{find_module, is_prime};
pub use tournament::{density, BackwardEdgeGraph, Tournament, VertexOrdering};
pub use transitive::{largest_transitive, transitive_number};
