use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::word::{parse_seq, write_seq};

/// A classical pattern `tau`, a permutation of `1..=l` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PermPattern {
    values: Vec<usize>,
}

impl PermPattern {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let mut sorted = values.clone();
        sorted.sort_unstable();
        if values.is_empty() || sorted.iter().enumerate().any(|(i, &v)| v != i + 1) {
            return Err(Error::domain(format!("{values:?} is not a permutation of 1..=l")));
        }
        Ok(PermPattern { values })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.values.len()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        inv
    }
}

impl fmt::Display for PermPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_seq(f, self.values.iter().copied())
    }
}

impl FromStr for PermPattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v = parse_seq(s)?.into_iter().map(|x| x as usize).collect();
        PermPattern::new(v).map_err(Error::into_parse)
    }
}

impl TryFrom<String> for PermPattern {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PermPattern> for String {
    fn from(p: PermPattern) -> String {
        p.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let p: PermPattern = "231".parse().unwrap();
        assert_eq!(p, "2,3,1".parse().unwrap());
        assert_eq!(p.inverse(), vec![3, 1, 2]);
        assert!("221".parse::<PermPattern>().is_err());
        assert!("24".parse::<PermPattern>().is_err());
        let long: PermPattern = "1,2,3,4,5,6,7,8,9,10".parse().unwrap();
        assert_eq!(long.to_string().parse::<PermPattern>().unwrap(), long);
    }
}
