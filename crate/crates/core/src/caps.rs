use serde::{Deserialize, Serialize};

/// Resource limits for the exact algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Maximum `N_L * N_R` pair tests for materialization.
    pub max_pairs: u64,
    /// Largest clause count for which a `2^n` zeta table is built.
    pub max_sos_bits: u32,
    /// Maximum `C(N_L,2) * C(N_R,2)` quadruples for brute-force counting.
    pub max_quadruples: u64,
}

impl Caps {
    pub const DEFAULT_MAX_PAIRS: u64 = 100_000_000;
    pub const DEFAULT_MAX_SOS_BITS: u32 = 24;
    pub const DEFAULT_MAX_QUADRUPLES: u64 = 250_000_000;
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_pairs: Self::DEFAULT_MAX_PAIRS,
            max_sos_bits: Self::DEFAULT_MAX_SOS_BITS,
            max_quadruples: Self::DEFAULT_MAX_QUADRUPLES,
        }
    }
}

pub(crate) fn choose2(x: u64) -> u64 {
    if x < 2 {
        0
    } else {
        x * (x - 1) / 2
    }
}

pub(crate) fn choose2_u128(x: u128) -> u128 {
    if x < 2 {
        0
    } else {
        x * (x - 1) / 2
    }
}
