use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};
use crate::limits::Limits;

use super::Multiset;

/// A multiset permutation: a sequence of positive letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word {
    letters: Vec<u32>,
}

impl Word {
    pub fn new(letters: Vec<u32>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::domain("letters must be positive"));
        }
        Ok(Word { letters })
    }

    pub(crate) fn from_letters_unchecked(letters: Vec<u32>) -> Self {
        Word { letters }
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The content of the word, relabelled to `1..=k`.
    pub fn multiset(&self) -> Result<Multiset> {
        let mut counts = BTreeMap::new();
        for &l in &self.letters {
            *counts.entry(l as u64).or_insert(0) += 1;
        }
        Multiset::from_counts(&counts)
    }
}

fn digits_or_commas(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::parse("empty sequence"));
    }
    if s.contains(',') {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::parse(format!("bad entry {t:?} in {s:?}")))
            })
            .collect()
    } else {
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .ok_or_else(|| Error::parse(format!("bad digit {c:?} in {s:?}")))
            })
            .collect()
    }
}

pub(crate) fn write_seq(f: &mut fmt::Formatter<'_>, xs: impl Iterator<Item = usize> + Clone) -> fmt::Result {
    let compact = xs.clone().all(|x| (1..=9).contains(&x));
    for (i, x) in xs.enumerate() {
        if i > 0 && !compact {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

pub(crate) fn parse_seq(s: &str) -> Result<Vec<u32>> {
    digits_or_commas(s)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_seq(f, self.letters.iter().map(|&l| l as usize))
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Word::new(digits_or_commas(s)?).map_err(Error::into_parse)
    }
}

impl TryFrom<String> for Word {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

/// Lexicographic stream over `S_M`.
pub struct MultisetPerms {
    next: Option<Vec<u32>>,
}

impl Iterator for MultisetPerms {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Word::from_letters_unchecked(cur))
    }
}

/// Advances to the next arrangement in lexicographic order; false at the last one.
pub(crate) fn next_permutation<T: Ord>(xs: &mut [T]) -> bool {
    let Some(i) = xs.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = xs.iter().rposition(|x| *x > xs[i]).expect("pivot has a successor");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

pub fn enumerate_multiset_perms(m: &Multiset, limits: &Limits) -> Result<MultisetPerms> {
    check_cap("multiset size", m.n(), limits.word_len)?;
    Ok(MultisetPerms {
        next: Some(m.sorted_word().letters().to_vec()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(m: &str) -> Vec<Word> {
        enumerate_multiset_perms(&m.parse().unwrap(), &Limits::default())
            .unwrap()
            .collect()
    }

    #[test]
    fn counts_and_order() {
        assert_eq!(all("1^2,2^2,3").len(), 30);
        assert_eq!(all("1^3"), vec!["111".parse().unwrap()]);
        let w = all("1,2,3");
        assert_eq!(w.len(), 6);
        assert!(w.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(w[0].to_string(), "123");
    }

    #[test]
    fn cap_enforced() {
        let m = Multiset::distinct(11).unwrap();
        assert!(matches!(
            enumerate_multiset_perms(&m, &Limits::default()),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn text_forms() {
        let w: Word = "23112".parse().unwrap();
        assert_eq!(w.letters(), &[2, 3, 1, 1, 2]);
        assert_eq!(w.to_string(), "23112");
        let big: Word = "10,2,1".parse().unwrap();
        assert_eq!(big.to_string(), "10,2,1");
        assert!("1a".parse::<Word>().is_err());
        assert!("0".parse::<Word>().is_err());
        assert_eq!(w.multiset().unwrap().multiplicities(), &[2, 2, 1]);
    }
}
