//! Size caps for exhaustive computations.
//!
//! Defaults can be overridden through environment variables, read once on
//! first use:
//!
//! | variable                 | default | limits                               |
//! |--------------------------|---------|--------------------------------------|
//! | `KWISE_MAX_TABLE_N`      | 24      | truth-table materialization          |
//! | `KWISE_MAX_FULL_LP_N`    | 12      | atom-level linear programs           |
//! | `KWISE_MAX_BRUTE_N`      | 16      | binary brute-force strength checks   |
//! | `KWISE_MAX_QARY_N`       | 10      | q-ary brute-force strength checks    |
//! | `KWISE_MAX_SYMMETRIC_N`  | 2000    | count-reduced linear programs        |
//! | `KWISE_MAX_ORBITS`       | 20000   | block-reduced LP variables and rows  |
//! | `KWISE_MAX_ATOMS`        | 4194304 | atoms materialized by constructions  |

use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub table_n: usize,
    pub full_lp_n: usize,
    pub brute_binary_n: usize,
    pub brute_qary_n: usize,
    pub symmetric_n: usize,
    pub orbits: usize,
    pub atoms: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            table_n: 24,
            full_lp_n: 12,
            brute_binary_n: 16,
            brute_qary_n: 10,
            symmetric_n: 2000,
            orbits: 20_000,
            atoms: 1 << 22,
        }
    }
}

impl Caps {
    pub fn from_env() -> Self {
        let d = Caps::default();
        let read = |key: &str, fallback: usize| {
            std::env::var(key)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(fallback)
        };
        Caps {
            table_n: read("KWISE_MAX_TABLE_N", d.table_n).min(30),
            full_lp_n: read("KWISE_MAX_FULL_LP_N", d.full_lp_n).min(20),
            brute_binary_n: read("KWISE_MAX_BRUTE_N", d.brute_binary_n).min(30),
            brute_qary_n: read("KWISE_MAX_QARY_N", d.brute_qary_n),
            symmetric_n: read("KWISE_MAX_SYMMETRIC_N", d.symmetric_n),
            orbits: read("KWISE_MAX_ORBITS", d.orbits),
            atoms: read("KWISE_MAX_ATOMS", d.atoms),
        }
    }
}

static CAPS: OnceLock<Caps> = OnceLock::new();

/// Process-wide caps.
pub fn caps() -> &'static Caps {
    CAPS.get_or_init(Caps::from_env)
}

pub(crate) fn check(what: &'static str, value: usize, cap: usize) -> Result<()> {
    if value > cap {
        Err(Error::CapExceeded { what, value, cap })
    } else {
        Ok(())
    }
}
