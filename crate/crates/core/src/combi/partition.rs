use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};
use crate::limits::Limits;

/// A set partition of `[n]`. Blocks are sorted internally and ordered by minimum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n + 1];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::domain("blocks must be nonempty"));
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x == 0 || x > n || seen[x] {
                    return Err(Error::domain(format!("blocks do not partition [1..={n}]")));
                }
                seen[x] = true;
            }
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    /// Partition whose blocks are the classes of `labels[i]` for ball `i + 1`.
    pub fn from_labels<T: Eq + std::hash::Hash + Copy>(labels: &[T]) -> Self {
        let mut index = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            let b = *index.entry(*l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i + 1);
        }
        SetPartition { n: labels.len(), blocks }
    }

    /// Rebuilds from an arc list on `[n]`; arcs must have distinct starts and ends.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut next = vec![0usize; n + 1];
        let mut has_pred = vec![false; n + 1];
        for &(i, j) in arcs {
            if !(1 <= i && i < j && j <= n) || next[i] != 0 || has_pred[j] {
                return Err(Error::domain(format!("invalid arc set {arcs:?} on [{n}]")));
            }
            next[i] = j;
            has_pred[j] = true;
        }
        let blocks = (1..=n)
            .filter(|&i| !has_pred[i])
            .map(|start| {
                let mut b = vec![start];
                let mut cur = start;
                while next[cur] != 0 {
                    cur = next[cur];
                    b.push(cur);
                }
                b
            })
            .collect();
        SetPartition::new(blocks).map(|p| SetPartition { n, ..p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        arcs_of(self)
    }

    /// Restricted growth string: `rgs[i]` is the 0-based block index of `i + 1`.
    pub fn rgs(&self) -> Vec<usize> {
        let mut r = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                r[x - 1] = b;
            }
        }
        r
    }

    fn from_rgs(rgs: &[usize]) -> Self {
        let k = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        SetPartition { n: rgs.len(), blocks }
    }
}

/// Consecutive in-block pairs, sorted by start.
pub fn arcs_of(p: &SetPartition) -> Vec<(usize, usize)> {
    let mut arcs: Vec<(usize, usize)> = p
        .blocks
        .iter()
        .flat_map(|b| b.windows(2).map(|w| (w[0], w[1])))
        .collect();
    arcs.sort_unstable();
    arcs
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            f.write_str("{")?;
            for (i, x) in b.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    /// `"{1,3,4}{2,5}"`
    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('{')
                .ok_or_else(|| Error::parse(format!("expected '{{' in {s:?}")))?;
            let close = body
                .find('}')
                .ok_or_else(|| Error::parse(format!("unclosed block in {s:?}")))?;
            let block = body[..close]
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::parse(format!("bad element {t:?} in {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
            rest = body[close + 1..].trim_start();
        }
        if blocks.is_empty() {
            return Err(Error::parse("empty set partition"));
        }
        SetPartition::new(blocks).map_err(Error::into_parse)
    }
}

impl TryFrom<String> for SetPartition {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SetPartition> for String {
    fn from(p: SetPartition) -> String {
        p.to_string()
    }
}

/// Lexicographic stream over restricted growth strings of length `n`.
pub struct SetPartitions {
    rgs: Vec<usize>,
    /// `maxes[i]` is the maximum of `rgs[..i]`, or 0 for `i = 0`.
    maxes: Vec<usize>,
    done: bool,
}

impl Iterator for SetPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let out = SetPartition::from_rgs(&self.rgs);
        let n = self.rgs.len();
        self.done = true;
        for i in (1..n).rev() {
            if self.rgs[i] <= self.maxes[i] {
                self.rgs[i] += 1;
                for t in i + 1..n {
                    self.maxes[t] = self.maxes[t - 1].max(self.rgs[t - 1]);
                    self.rgs[t] = 0;
                }
                self.done = false;
                break;
            }
        }
        Some(out)
    }
}

pub fn enumerate_set_partitions(n: usize, limits: &Limits) -> Result<SetPartitions> {
    if n == 0 {
        return Err(Error::domain("set partitions need n >= 1"));
    }
    check_cap("set partition size", n, limits.set_partition_size)?;
    Ok(unchecked_partitions(n))
}

pub(crate) fn unchecked_partitions(n: usize) -> SetPartitions {
    SetPartitions {
        rgs: vec![0; n],
        maxes: vec![0; n],
        done: n == 0,
    }
}

/// An arc pattern on `[l]`: arcs with distinct starts and distinct ends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ArcPattern {
    arcs: Vec<(usize, usize)>,
    len: usize,
}

impl ArcPattern {
    pub fn new(mut arcs: Vec<(usize, usize)>, len: usize) -> Result<Self> {
        arcs.sort_unstable();
        let mut starts = vec![false; len + 1];
        let mut ends = vec![false; len + 1];
        for &(i, j) in &arcs {
            if !(1 <= i && i < j && j <= len) {
                return Err(Error::domain(format!("arc ({i},{j}) is not inside [1..={len}]")));
            }
            if starts[i] || ends[j] {
                return Err(Error::domain(format!("arcs {arcs:?} repeat a start or an end")));
            }
            starts[i] = true;
            ends[j] = true;
        }
        if len == 0 {
            return Err(Error::domain("arc pattern length must be at least 1"));
        }
        Ok(ArcPattern { arcs, len })
    }

    /// Length taken as the largest endpoint.
    pub fn from_arcs(arcs: Vec<(usize, usize)>) -> Result<Self> {
        let len = arcs.iter().map(|a| a.1).max().unwrap_or(0);
        ArcPattern::new(arcs, len)
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// `l`
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `a`
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }
}

impl fmt::Display for ArcPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (i, j)) in self.arcs.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}-{j}")?;
        }
        let support = self.arcs.iter().map(|a| a.1).max().unwrap_or(0);
        if self.len != support {
            write!(f, ":{}", self.len)?;
        }
        Ok(())
    }
}

impl FromStr for ArcPattern {
    type Err = Error;

    /// `"1-3,2-4"`, optionally suffixed with `":l"` to pad the length.
    fn from_str(s: &str) -> Result<Self> {
        let (body, len) = match s.split_once(':') {
            Some((b, l)) => {
                let l: usize = l
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(format!("bad length in arc pattern {s:?}")))?;
                (b.trim(), Some(l))
            }
            None => (s.trim(), None),
        };
        let mut arcs = Vec::new();
        if !body.is_empty() {
            for item in body.split(',') {
                let (i, j) = item
                    .split_once('-')
                    .ok_or_else(|| Error::parse(format!("bad arc {item:?} in {s:?}")))?;
                let i: usize = i
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(format!("bad arc {item:?} in {s:?}")))?;
                let j: usize = j
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(format!("bad arc {item:?} in {s:?}")))?;
                arcs.push((i, j));
            }
        }
        let support = arcs.iter().map(|a: &(usize, usize)| a.1).max().unwrap_or(0);
        let len = len.unwrap_or(support);
        if len < support {
            return Err(Error::parse(format!("length {len} shorter than arcs in {s:?}")));
        }
        ArcPattern::new(arcs, len).map_err(Error::into_parse)
    }
}

impl TryFrom<String> for ArcPattern {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ArcPattern> for String {
    fn from(p: ArcPattern) -> String {
        p.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(n: usize) -> usize {
        enumerate_set_partitions(n, &Limits::default()).unwrap().count()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(count(1), 1);
        assert_eq!(count(3), 5);
        assert_eq!(count(4), 15);
        assert!(enumerate_set_partitions(13, &Limits::default()).is_err());
        assert!(enumerate_set_partitions(0, &Limits::default()).is_err());
    }

    #[test]
    fn enumeration_is_lexicographic_in_rgs() {
        let rgs: Vec<Vec<usize>> = enumerate_set_partitions(4, &Limits::default())
            .unwrap()
            .map(|p| p.rgs())
            .collect();
        assert!(rgs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(rgs[0], vec![0, 0, 0, 0]);
        assert_eq!(rgs[14], vec![0, 1, 2, 3]);
    }

    #[test]
    fn arcs_examples() {
        let p: SetPartition = "{1,3,4}{2,5}".parse().unwrap();
        assert_eq!(p.arcs(), vec![(1, 3), (2, 5), (3, 4)]);
        let s: SetPartition = "{1}{2}{3}".parse().unwrap();
        assert!(s.arcs().is_empty());
        let one: SetPartition = "{1,2,3}".parse().unwrap();
        assert_eq!(one.arcs(), vec![(1, 2), (2, 3)]);
        assert_eq!(SetPartition::from_arcs(5, &p.arcs()).unwrap(), p);
    }

    #[test]
    fn partition_text() {
        let p: SetPartition = " {5,2}{4,1,3} ".parse().unwrap();
        assert_eq!(p.to_string(), "{1,3,4}{2,5}");
        assert!("{1,2}{2}".parse::<SetPartition>().is_err());
        assert!("{1,3}".parse::<SetPartition>().is_err());
        assert!("{1,2".parse::<SetPartition>().is_err());
        assert!("{}".parse::<SetPartition>().is_err());
    }

    #[test]
    fn arc_pattern_text() {
        let a: ArcPattern = "1-3,2-4".parse().unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.arc_count(), 2);
        assert_eq!(a.to_string(), "1-3,2-4");
        let padded: ArcPattern = "1-2:4".parse().unwrap();
        assert_eq!(padded.len(), 4);
        assert_eq!(padded.to_string(), "1-2:4");
        let empty: ArcPattern = ":1".parse().unwrap();
        assert_eq!(empty.len(), 1);
        assert_eq!(empty.to_string(), ":1");
        assert!("1-3,1-4".parse::<ArcPattern>().is_err());
        assert!("1-3,2-3".parse::<ArcPattern>().is_err());
        assert!("3-1".parse::<ArcPattern>().is_err());
        assert!("1-3:2".parse::<ArcPattern>().is_err());
    }
}
