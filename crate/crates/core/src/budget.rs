//! Size limits for the exhaustive routines.
//!
//! Every exact solver in this crate is exponential somewhere. Instead of
//! silently degrading to a heuristic, each one checks its input against a
//! limit and returns [`Error::BudgetExceeded`]. Limits can be raised through
//! environment variables, read once per process:
//!
//! | variable                     | default | used by                         |
//! |------------------------------|---------|---------------------------------|
//! | `NEBULAE_TR_MAX_N`           | 24      | `largest_transitive`            |
//! | `NEBULAE_CANON_MAX_N`        | 12      | `canonical_form`, `isomorphic`  |
//! | `NEBULAE_ENUM_MAX_N`         | 8       | `enumerate_tournaments`         |
//! | `NEBULAE_ORDERING_MAX_N`     | 10      | `find_ordering`                 |
//! | `NEBULAE_REGULAR_EXACT_MAX`  | 12      | `regular_pair_exact`            |
//! | `NEBULAE_BRUTE_FORCE_MAX`    | 5000000 | `brute_force_contains` (C(n,h)·h!) |

use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub tr_max_n: usize,
    pub canon_max_n: usize,
    pub enum_max_n: usize,
    pub ordering_max_n: usize,
    pub regular_exact_max: usize,
    pub brute_force_max: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            tr_max_n: 24,
            canon_max_n: 12,
            enum_max_n: 8,
            ordering_max_n: 10,
            regular_exact_max: 12,
            brute_force_max: 5_000_000,
        }
    }
}

impl Limits {
    pub fn from_env() -> Self {
        fn read(name: &str, default: usize) -> usize {
            std::env::var(name)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(default)
        }
        let d = Limits::default();
        Limits {
            tr_max_n: read("NEBULAE_TR_MAX_N", d.tr_max_n).min(30),
            canon_max_n: read("NEBULAE_CANON_MAX_N", d.canon_max_n),
            enum_max_n: read("NEBULAE_ENUM_MAX_N", d.enum_max_n).min(10),
            ordering_max_n: read("NEBULAE_ORDERING_MAX_N", d.ordering_max_n),
            regular_exact_max: read("NEBULAE_REGULAR_EXACT_MAX", d.regular_exact_max).min(20),
            brute_force_max: read("NEBULAE_BRUTE_FORCE_MAX", d.brute_force_max as usize) as u128,
        }
    }
}

/// Process-wide limits (environment overrides applied on first use).
pub fn limits() -> &'static Limits {
    static LIMITS: OnceLock<Limits> = OnceLock::new();
    LIMITS.get_or_init(Limits::from_env)
}

pub(crate) fn check(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::BudgetExceeded { what, size, limit })
    } else {
        Ok(())
    }
}
