//! The partition lattice `P([r])` as used by moment-cumulant expansions.

use std::sync::OnceLock;

use super::partition::unchecked_partitions;
use super::SetPartition;

pub type LatticePartition = SetPartition;

/// One summand of the moment-cumulant formula: blocks as 0-based indices into the bag.
#[derive(Debug, Clone)]
pub struct LatticeTerm {
    pub blocks: Vec<Vec<usize>>,
    pub mu: i64,
}

/// `mu(pi, 1) = (-1)^{k-1} (k-1)!` for a partition with `k` blocks.
pub fn mobius_partition_lattice(p: &LatticePartition) -> i64 {
    mobius_closed(p.num_blocks())
}

fn mobius_closed(k: usize) -> i64 {
    let f: i64 = (1..k as i64).product();
    if k % 2 == 1 {
        f
    } else {
        -f
    }
}

/// `mu(pi, 1)` for every `pi` in `P([r])`, computed from the defining recursion
/// `mu(x, 1) = -sum_{x < z <= 1} mu(z, 1)` without the closed form.
pub fn mobius_recursive(r: usize) -> Vec<(LatticePartition, i64)> {
    let mut parts: Vec<SetPartition> = unchecked_partitions(r).collect();
    parts.sort_by_key(SetPartition::num_blocks);
    let rgs: Vec<Vec<usize>> = parts.iter().map(SetPartition::rgs).collect();
    let refines = |fine: &[usize], coarse: &[usize]| {
        (0..fine.len()).all(|i| (0..i).all(|j| fine[i] != fine[j] || coarse[i] == coarse[j]))
    };
    let mut mu: Vec<i64> = Vec::with_capacity(parts.len());
    for (x, rx) in rgs.iter().enumerate() {
        let s: i64 = (0..x)
            .filter(|&z| parts[z].num_blocks() < parts[x].num_blocks() && refines(rx, &rgs[z]))
            .map(|z| mu[z])
            .sum();
        mu.push(if x == 0 { 1 } else { -s });
    }
    parts.into_iter().zip(mu).collect()
}

const CACHED: usize = 8;

/// All of `P([r])` with Möbius weights; cached for `r <= 8`.
pub fn lattice_terms(r: usize) -> std::borrow::Cow<'static, [LatticeTerm]> {
    static CACHE: [OnceLock<Vec<LatticeTerm>>; CACHED + 1] = [const { OnceLock::new() }; CACHED + 1];
    if r <= CACHED {
        std::borrow::Cow::Borrowed(CACHE[r].get_or_init(|| build_terms(r)).as_slice())
    } else {
        std::borrow::Cow::Owned(build_terms(r))
    }
}

fn build_terms(r: usize) -> Vec<LatticeTerm> {
    if r == 0 {
        return Vec::new();
    }
    unchecked_partitions(r)
        .map(|p| LatticeTerm {
            mu: mobius_partition_lattice(&p),
            blocks: p
                .blocks()
                .iter()
                .map(|b| b.iter().map(|x| x - 1).collect())
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_recursion() {
        for r in 1..=5 {
            for (p, mu) in mobius_recursive(r) {
                assert_eq!(mobius_partition_lattice(&p), mu, "{p}");
            }
        }
    }

    #[test]
    fn examples() {
        let top: SetPartition = "{1,2,3}".parse().unwrap();
        assert_eq!(mobius_partition_lattice(&top), 1);
        let s2: SetPartition = "{1}{2}".parse().unwrap();
        assert_eq!(mobius_partition_lattice(&s2), -1);
        let s3: SetPartition = "{1}{2}{3}".parse().unwrap();
        assert_eq!(mobius_partition_lattice(&s3), 2);
    }

    #[test]
    fn column_sums_vanish() {
        for r in 2..=7 {
            assert_eq!(lattice_terms(r).iter().map(|t| t.mu).sum::<i64>(), 0);
        }
        assert_eq!(lattice_terms(1).len(), 1);
        assert_eq!(lattice_terms(6).len(), 203);
    }
}
