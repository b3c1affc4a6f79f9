//! Exact combinatorial primitives.

mod bell;
mod lattice;
mod multiset;
mod partition;
mod pattern;
mod word;

pub use bell::{bell_number, bell_numbers};
pub use lattice::{lattice_terms, mobius_partition_lattice, mobius_recursive, LatticePartition, LatticeTerm};
pub use multiset::{elementary_symmetric, regularity_ratio, residual_size, Multiset};
pub use partition::{arcs_of, enumerate_set_partitions, ArcPattern, SetPartition, SetPartitions};
pub use pattern::PermPattern;
pub use word::{enumerate_multiset_perms, MultisetPerms, Word};

use num_bigint::BigUint;
use num_traits::One;

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `C(n, k)` in `u128`, saturating at `u128::MAX`.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        match acc.checked_mul(n as u128 - i) {
            Some(v) => acc = v / (i + 1),
            None => return u128::MAX,
        }
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_agree() {
        for n in 0..40u64 {
            for k in 0..=n + 1 {
                assert_eq!(BigUint::from(binomial_u128(n, k)), binomial(n, k));
            }
        }
        assert_eq!(binomial(5, 2), BigUint::from(10u8));
    }
}
