//! The two twelve-vertex prime nebulae used throughout the tests and by
//! `nebulae verify-paper-examples`.
//!
//! Both are given by backward edges under the identity ordering. Edge lists
//! use one-based labels `(later, earlier)`, as they are usually written.

use crate::tournament::{Tournament, VertexOrdering};

/// Backward edges of the left-nebula example, one-based.
pub const LEFT_EXAMPLE_EDGES: [(usize, usize); 7] =
    [(5, 1), (9, 1), (8, 6), (11, 6), (4, 2), (10, 3), (12, 7)];

/// Backward edges of the central-nebula example, one-based.
pub const CENTRAL_EXAMPLE_EDGES: [(usize, usize); 8] = [
    (4, 1),
    (8, 4),
    (5, 3),
    (9, 5),
    (6, 2),
    (11, 6),
    (10, 7),
    (12, 10),
];

pub(crate) fn from_one_based(n: usize, edges: &[(usize, usize)]) -> Tournament {
    let zero: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    Tournament::from_backward_edges(n, &VertexOrdering::identity(n), &zero)
        .expect("embedded example is well formed")
}

/// A prime left nebula on twelve vertices that is not a galaxy.
pub fn left_example() -> Tournament {
    from_one_based(12, &LEFT_EXAMPLE_EDGES)
}

/// A prime central nebula on twelve vertices.
pub fn central_example() -> Tournament {
    from_one_based(12, &CENTRAL_EXAMPLE_EDGES)
}
