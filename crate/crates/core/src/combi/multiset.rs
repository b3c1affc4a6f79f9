use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::{factorial, Word};

/// A finite multiset of positive letters, stored as multiplicities of `1..=k`.
///
/// Labels are normalized on ingestion: only their relative order survives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Multiset {
    mult: Vec<usize>,
    n: usize,
}

impl Multiset {
    /// Multiplicities of `1, 2, ..., k` in that order.
    pub fn new(mult: Vec<usize>) -> Result<Self> {
        if mult.is_empty() {
            return Err(Error::domain("multiset must be nonempty"));
        }
        if mult.contains(&0) {
            return Err(Error::domain("every multiplicity must be at least 1"));
        }
        let n = mult.iter().sum();
        Ok(Multiset { mult, n })
    }

    /// Builds from arbitrary positive labels, relabelling them `1..=k` by rank.
    pub fn from_counts(counts: &BTreeMap<u64, usize>) -> Result<Self> {
        if counts.keys().any(|&v| v == 0) {
            return Err(Error::domain("letters must be positive"));
        }
        Multiset::new(counts.values().copied().collect())
    }

    /// `{1, 2, ..., n}`, all multiplicities 1.
    pub fn distinct(n: usize) -> Result<Self> {
        Multiset::new(vec![1; n])
    }

    /// `k` letters whose multiplicities differ by at most one and sum to `n`.
    pub fn balanced(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::domain(format!("cannot balance {n} letters over {k} values")));
        }
        let (q, r) = (n / k, n % k);
        Multiset::new((0..k).map(|j| q + usize::from(j < r)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of distinct letters.
    pub fn k(&self) -> usize {
        self.mult.len()
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.mult
    }

    /// `a_j` for a 1-based letter `j`, 0 when absent.
    pub fn multiplicity(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.mult.get(j - 1).copied().unwrap_or(0)
        }
    }

    /// Multiplicities in nonincreasing order (`b_1 >= b_2 >= ...`).
    pub fn sorted_desc(&self) -> Vec<usize> {
        let mut b = self.mult.clone();
        b.sort_unstable_by(|x, y| y.cmp(x));
        b
    }

    /// The nondecreasing word `1^{a_1} 2^{a_2} ...`.
    pub fn sorted_word(&self) -> Word {
        let letters = self
            .mult
            .iter()
            .enumerate()
            .flat_map(|(j, &a)| std::iter::repeat_n(j as u32 + 1, a))
            .collect();
        Word::from_letters_unchecked(letters)
    }

    /// `n! / prod a_j!`
    pub fn multinomial(&self) -> BigUint {
        let den = self
            .mult
            .iter()
            .fold(BigUint::one(), |acc, &a| acc * factorial(a as u64));
        factorial(self.n as u64) / den
    }
}

/// `e_d(M)`: sum over `d`-subsets of distinct letters of the product of multiplicities.
pub fn elementary_symmetric(m: &Multiset, d: usize) -> BigUint {
    // Coefficients of prod (1 + a_j x), truncated at degree d.
    let mut e = vec![BigUint::zero(); d + 1];
    e[0] = BigUint::one();
    for &a in &m.mult {
        for i in (1..=d).rev() {
            let add = &e[i - 1] * a;
            e[i] += add;
        }
    }
    e.swap_remove(d)
}

/// `n_(j) = n - b_1 - ... - b_j`; 0 once `j` reaches the number of distinct letters.
pub fn residual_size(m: &Multiset, j: usize) -> usize {
    m.n - m.sorted_desc().iter().take(j).sum::<usize>()
}

/// `(b_1 + ... + b_l) / n`.
pub fn regularity_ratio(m: &Multiset, l: usize) -> Rational {
    let top: usize = m.sorted_desc().iter().take(l).sum();
    Rational::new(BigInt::from(top), BigInt::from(m.n))
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, &a) in self.mult.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            if a == 1 {
                write!(f, "{}", j + 1)?;
            } else {
                write!(f, "{}^{}", j + 1, a)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Multiset {
    type Err = Error;

    /// `"1^2,2^2,3"`; repeated letters accumulate.
    fn from_str(s: &str) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for item in s.split(',').map(str::trim) {
            if item.is_empty() {
                return Err(Error::parse(format!("empty item in multiset {s:?}")));
            }
            let (v, c) = match item.split_once('^') {
                Some((v, c)) => (v.trim(), c.trim()),
                None => (item, "1"),
            };
            let v: u64 = v
                .parse()
                .map_err(|_| Error::parse(format!("bad letter {v:?} in multiset {s:?}")))?;
            let c: usize = c
                .parse()
                .map_err(|_| Error::parse(format!("bad count {c:?} in multiset {s:?}")))?;
            if v == 0 || c == 0 {
                return Err(Error::parse(format!("letters and counts must be positive in {s:?}")));
            }
            *counts.entry(v).or_insert(0) += c;
        }
        Multiset::from_counts(&counts).map_err(Error::into_parse)
    }
}

impl TryFrom<String> for Multiset {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Multiset> for String {
    fn from(m: Multiset) -> String {
        m.to_string()
    }
}
