//! Enumeration caps shared by every brute-force routine.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest multiset size whose permutations may be enumerated.
    pub word_len: usize,
    /// Largest `n` for which all set partitions of `[n]` may be enumerated.
    pub set_partition_size: usize,
    /// Largest cumulant order accepted by the moment-cumulant routines.
    pub cumulant_order: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            word_len: 10,
            set_partition_size: 12,
            cumulant_order: 6,
        }
    }
}
