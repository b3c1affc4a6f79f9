//! Exact joint moments and joint cumulants of indicator families.
//!
//! Cumulants are expanded over the partition lattice,
//! `kappa(B) = sum_pi mu(pi, 1) prod_{blocks} E[prod block]`, with each block
//! reduced by `X^2 = X` before the moment oracle sees it.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, Zero};
use serde::{Deserialize, Serialize};

use crate::combi::{enumerate_multiset_perms, enumerate_set_partitions, lattice_terms, Multiset};
use crate::error::{check_cap, Error, Result};
use crate::limits::Limits;
use crate::rational::{to_f64, Rational};
use crate::samplers::MUrnLaw;

/// `X_i^j`: position `i` carries letter `j` (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MPermIndicator {
    pub pos: usize,
    pub value: usize,
}

impl MPermIndicator {
    pub fn new(pos: usize, value: usize) -> Self {
        MPermIndicator { pos, value }
    }
}

/// `X_{ij}`: the partition has an arc from `i` to `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArcIndicator {
    pub start: usize,
    pub end: usize,
}

impl ArcIndicator {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start == 0 || start >= end {
            return Err(Error::domain(format!("arc ({start},{end}) needs 1 <= start < end")));
        }
        Ok(ArcIndicator { start, end })
    }
}

impl fmt::Display for MPermIndicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.pos, self.value)
    }
}

impl fmt::Display for ArcIndicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

fn parse_pair(item: &str, sep: char) -> Result<(usize, usize)> {
    let (a, b) = item
        .split_once(sep)
        .ok_or_else(|| Error::parse(format!("expected '<int>{sep}<int>', got {item:?}")))?;
    let a = a.trim().parse().map_err(|_| Error::parse(format!("bad integer in {item:?}")))?;
    let b = b.trim().parse().map_err(|_| Error::parse(format!("bad integer in {item:?}")))?;
    Ok((a, b))
}

impl FromStr for MPermIndicator {
    type Err = Error;
    /// `"pos:value"`
    fn from_str(s: &str) -> Result<Self> {
        let (i, j) = parse_pair(s, ':')?;
        if i == 0 || j == 0 {
            return Err(Error::parse(format!("positions and letters are 1-based in {s:?}")));
        }
        Ok(MPermIndicator::new(i, j))
    }
}

impl FromStr for ArcIndicator {
    type Err = Error;
    /// `"start-end"`
    fn from_str(s: &str) -> Result<Self> {
        let (i, j) = parse_pair(s, '-')?;
        ArcIndicator::new(i, j).map_err(Error::into_parse)
    }
}

/// Comma-separated list of indicators.
pub fn parse_list<T: FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(|t| t.trim().parse()).collect()
}

/// The random object underlying an indicator family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Uniform multiset permutation of `M`.
    MPerm(Multiset),
    /// Uniform set partition of `[n]`.
    SetPart(usize),
}

/// A homogeneous multiset of indicators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndicatorBag {
    MPerm(Vec<MPermIndicator>),
    Arcs(Vec<ArcIndicator>),
}

impl IndicatorBag {
    pub fn len(&self) -> usize {
        match self {
            IndicatorBag::MPerm(v) => v.len(),
            IndicatorBag::Arcs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exact joint moments `E[prod_{x in C} x]`.
pub trait MomentOracle {
    type Ind: Copy + Ord + Hash + fmt::Debug;

    /// `inds` is sorted, free of repeats, and may be empty.
    fn moment(&self, inds: &[Self::Ind]) -> Result<Rational>;
}

fn falling(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

/// Closed form for multiset permutations. Two different letters at one
/// position give 0; otherwise `prod_j a_j^{(c_j)} / n^{(|C|)}` (falling
/// factorials), which is the ratio of multinomials.
#[derive(Debug, Clone)]
pub struct MPermClosedForm {
    m: Multiset,
}

impl MPermClosedForm {
    pub fn new(m: Multiset) -> Self {
        MPermClosedForm { m }
    }

    fn check(&self, c: &[MPermIndicator]) -> Result<()> {
        for x in c {
            if x.pos == 0 || x.pos > self.m.n() || x.value == 0 || x.value > self.m.k() {
                return Err(Error::domain(format!("indicator {x} is outside M = {}", self.m)));
            }
        }
        Ok(())
    }

    fn eval(&self, c: &[MPermIndicator]) -> Rational {
        let mut used = vec![0usize; self.m.k() + 1];
        for x in c {
            used[x.value] += 1;
        }
        let mut num = BigInt::one();
        for (j, &u) in used.iter().enumerate().skip(1) {
            let a = self.m.multiplicity(j);
            if u > a {
                return Rational::zero();
            }
            num *= falling(a, u);
        }
        Rational::new(num, falling(self.m.n(), c.len()))
    }
}

impl MomentOracle for MPermClosedForm {
    type Ind = MPermIndicator;

    fn moment(&self, inds: &[MPermIndicator]) -> Result<Rational> {
        self.check(inds)?;
        if inds.windows(2).any(|w| w[0].pos == w[1].pos) {
            return Ok(Rational::zero());
        }
        Ok(self.eval(inds))
    }
}

/// Closed-form joint moment for a set of indicators at distinct positions.
pub fn joint_moment_mperm_closed(m: &Multiset, c: &[MPermIndicator]) -> Result<Rational> {
    let mut c = c.to_vec();
    c.sort_unstable();
    c.dedup();
    if c.windows(2).any(|w| w[0].pos == w[1].pos) {
        return Err(Error::precondition(
            "closed form needs distinct positions; use the enumeration oracle",
        ));
    }
    let oracle = MPermClosedForm::new(m.clone());
    oracle.check(&c)?;
    Ok(oracle.eval(&c))
}

/// Averages over every word of `S_M`.
#[derive(Debug, Clone)]
pub struct WordEnumeration {
    m: Multiset,
    words: Vec<Vec<u32>>,
}

impl WordEnumeration {
    pub fn new(m: &Multiset, limits: &Limits) -> Result<Self> {
        let words = enumerate_multiset_perms(m, limits)?
            .map(|w| w.letters().to_vec())
            .collect();
        Ok(WordEnumeration { m: m.clone(), words })
    }
}

impl MomentOracle for WordEnumeration {
    type Ind = MPermIndicator;

    fn moment(&self, inds: &[MPermIndicator]) -> Result<Rational> {
        for x in inds {
            if x.pos == 0 || x.pos > self.m.n() {
                return Err(Error::domain(format!("indicator {x} is outside M = {}", self.m)));
            }
        }
        let hits = self
            .words
            .iter()
            .filter(|w| inds.iter().all(|x| w[x.pos - 1] as usize == x.value))
            .count();
        Ok(Rational::new(BigInt::from(hits), BigInt::from(self.words.len())))
    }
}

/// Averages over every set partition of `[n]`, each stored as an arc bitmask.
#[derive(Debug, Clone)]
pub struct PartitionEnumeration {
    n: usize,
    masks: Vec<u128>,
}

/// Bit index of the arc `(i, j)` among all pairs of `[n]`, `n <= 16`.
pub(crate) fn arc_bit(n: usize, a: &ArcIndicator) -> u32 {
    let (i, j) = (a.start - 1, a.end - 1);
    // Pairs with smaller start come first.
    (i * (2 * n - i - 1) / 2 + (j - i - 1)) as u32
}

impl PartitionEnumeration {
    pub fn new(n: usize, limits: &Limits) -> Result<Self> {
        check_cap("set partition size", n, limits.set_partition_size.min(16))?;
        let masks = enumerate_set_partitions(n, limits)?
            .map(|p| {
                p.arcs().iter().fold(0u128, |acc, &(i, j)| {
                    acc | 1u128 << arc_bit(n, &ArcIndicator { start: i, end: j })
                })
            })
            .collect();
        Ok(PartitionEnumeration { n, masks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn mask(&self, inds: &[ArcIndicator]) -> Result<u128> {
        let mut m = 0u128;
        for a in inds {
            if a.end > self.n || a.start == 0 || a.start >= a.end {
                return Err(Error::domain(format!("arc {a} is outside [{}]", self.n)));
            }
            m |= 1u128 << arc_bit(self.n, a);
        }
        Ok(m)
    }
}

impl MomentOracle for PartitionEnumeration {
    type Ind = ArcIndicator;

    fn moment(&self, inds: &[ArcIndicator]) -> Result<Rational> {
        let m = self.mask(inds)?;
        let hits = self.masks.iter().filter(|&&x| x & m == m).count();
        Ok(Rational::new(BigInt::from(hits), BigInt::from(self.masks.len())))
    }
}

/// Conditional arc moments given `M = m` under Stam's urn model.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalArcs {
    pub n: usize,
    pub m: usize,
}

impl MomentOracle for ConditionalArcs {
    type Ind = ArcIndicator;

    fn moment(&self, inds: &[ArcIndicator]) -> Result<Rational> {
        cond_joint_moment_setpart(self.n, self.m, inds)
    }
}

/// Caches every query of the wrapped oracle. Not `Sync`; use one per thread.
#[derive(Debug)]
pub struct Memoized<O: MomentOracle> {
    inner: O,
    cache: RefCell<HashMap<Vec<O::Ind>, Rational>>,
}

impl<O: MomentOracle> Memoized<O> {
    pub fn new(inner: O) -> Self {
        Memoized {
            inner,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn cached(&self) -> usize {
        self.cache.borrow().len()
    }
}

impl<O: MomentOracle> MomentOracle for Memoized<O> {
    type Ind = O::Ind;

    fn moment(&self, inds: &[O::Ind]) -> Result<Rational> {
        if let Some(v) = self.cache.borrow().get(inds) {
            return Ok(v.clone());
        }
        let v = self.inner.moment(inds)?;
        self.cache.borrow_mut().insert(inds.to_vec(), v.clone());
        Ok(v)
    }
}

/// Brute-force joint moment by enumerating the whole family.
pub fn joint_moment_bruteforce(family: &Family, bag: &IndicatorBag, limits: &Limits) -> Result<Rational> {
    match (family, bag) {
        (Family::MPerm(m), IndicatorBag::MPerm(c)) => {
            WordEnumeration::new(m, limits)?.moment(&normalize(c))
        }
        (Family::SetPart(n), IndicatorBag::Arcs(c)) => {
            PartitionEnumeration::new(*n, limits)?.moment(&normalize(c))
        }
        _ => Err(Error::precondition("indicator kind does not match the family")),
    }
}

fn normalize<T: Copy + Ord>(xs: &[T]) -> Vec<T> {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Joint cumulant of `r` variables from their subset moments.
///
/// `moment(mask)` returns `E[prod_{i in mask} Y_i]` for a nonempty bitmask
/// over `0..r`; each mask is requested at most once.
pub fn cumulant_from_subset_moments<T, F>(r: usize, mut moment: F) -> Result<T>
where
    T: Clone + Zero + One + FromPrimitive + std::ops::Mul<Output = T>,
    F: FnMut(u32) -> Result<T>,
{
    if r == 0 || r > 20 {
        return Err(Error::domain(format!("cumulant order {r} is out of range")));
    }
    let mut cache: Vec<Option<T>> = vec![None; 1 << r];
    let mut total = T::zero();
    for term in lattice_terms(r).iter() {
        let mut prod = T::from_i64(term.mu).expect("Möbius value is representable");
        for block in &term.blocks {
            let mask = block.iter().fold(0u32, |acc, &i| acc | 1 << i);
            if cache[mask as usize].is_none() {
                cache[mask as usize] = Some(moment(mask)?);
            }
            prod = prod * cache[mask as usize].clone().expect("filled above");
        }
        total = total + prod;
    }
    Ok(total)
}

/// `kappa(B)` for a bag of indicators, exact. Order is capped by
/// `limits.cumulant_order`.
pub fn joint_cumulant<O: MomentOracle>(oracle: &O, bag: &[O::Ind], limits: &Limits) -> Result<Rational> {
    if bag.is_empty() {
        return Err(Error::domain("cumulant of an empty bag"));
    }
    check_cap("cumulant order", bag.len(), limits.cumulant_order)?;
    cumulant_from_subset_moments(bag.len(), |mask| {
        let sub: Vec<O::Ind> = (0..bag.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| bag[i])
            .collect();
        oracle.moment(&normalize(&sub))
    })
}

/// Number of arcs of `b` passing strictly over `g`.
fn over(b: &[ArcIndicator], g: usize) -> usize {
    b.iter().filter(|a| a.start < g && g < a.end).count()
}

/// `E[prod_{X in B} X | M = m]` under Stam's urn model:
/// `m^{-a} prod_{g not an arc end} (m - a(g)) / m`, with `a(g)` the number of
/// arcs over `g`; 0 for incompatible arcs or any nonpositive factor.
pub fn cond_joint_moment_setpart(n: usize, m: usize, b: &[ArcIndicator]) -> Result<Rational> {
    if m == 0 {
        return Err(Error::domain("urn count must be at least 1"));
    }
    let b = normalize(b);
    if let Some(a) = b.iter().find(|a| a.end > n || a.start == 0 || a.start >= a.end) {
        return Err(Error::domain(format!("arc {a} is outside [{n}]")));
    }
    let mut ends = vec![false; n + 1];
    let mut starts = vec![false; n + 1];
    for a in &b {
        if ends[a.end] || starts[a.start] {
            return Ok(Rational::zero());
        }
        ends[a.end] = true;
        starts[a.start] = true;
    }
    let mut num = BigInt::one();
    let mut den_pow = b.len();
    for g in 1..=n {
        if ends[g] {
            continue;
        }
        let ag = over(&b, g);
        if ag == 0 {
            continue;
        }
        if ag >= m {
            return Ok(Rational::zero());
        }
        num *= BigInt::from(m - ag);
        den_pow += 1;
    }
    Ok(Rational::new(num, BigInt::from(m).pow(den_pow as u32)))
}

/// `P_Delta(u) = prod_{delta subset Delta} u_delta^{(-1)^{|Delta| - |delta|}}`,
/// subsets given as bitmasks. A `0/0` quotient is 0 by convention.
pub fn quasi_fact_factor(u: &BTreeMap<u32, Rational>, delta: u32) -> Result<Rational> {
    let mut num = Rational::one();
    let mut den = Rational::one();
    let size = delta.count_ones();
    let mut sub = delta;
    loop {
        let v = u
            .get(&sub)
            .ok_or_else(|| Error::precondition(format!("u is missing subset {sub:#b}")))?;
        if (size - sub.count_ones()).is_multiple_of(2) {
            num *= v;
        } else {
            den *= v;
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & delta;
    }
    if den.is_zero() {
        if num.is_zero() {
            return Ok(Rational::zero());
        }
        return Err(Error::domain("quasi-factorization factor divides by zero"));
    }
    Ok(num / den)
}

/// `u_Delta` recovered as `prod_{delta subset Delta} P_delta(u)`.
pub fn quasi_fact_invert(u: &BTreeMap<u32, Rational>, delta: u32) -> Result<Rational> {
    let mut acc = Rational::one();
    let mut sub = delta;
    loop {
        acc *= quasi_fact_factor(u, sub)?;
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & delta;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Serialize)]
pub struct TotalCumulanceReport {
    pub n: usize,
    pub bag: Vec<String>,
    /// Exact `kappa(B)` by enumeration, as `p/q`.
    pub lhs: String,
    pub lhs_f64: f64,
    /// `sum_rho kappa(kappa(X_b | M), b in rho)` over the truncated urn law.
    pub rhs: f64,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares both sides of the law of total cumulance for arc indicators.
pub fn total_cumulance_check(n: usize, bag: &[ArcIndicator], tail_tol: f64, limits: &Limits) -> Result<TotalCumulanceReport> {
    check_cap("set partition size", n, limits.set_partition_size.min(10))?;
    if bag.is_empty() || bag.len() > 3 {
        return Err(Error::domain("total cumulance check takes 1 to 3 arcs"));
    }
    let r = bag.len();
    let lhs = joint_cumulant(&Memoized::new(PartitionEnumeration::new(n, limits)?), bag, limits)?;
    let law = MUrnLaw::new(n, tail_tol)?;

    // cond[mask][k]: conditional cumulant of the sub-bag `mask` at the k-th urn count.
    let support: Vec<(usize, f64)> = law.support().collect();
    let mut cond: Vec<Vec<f64>> = vec![Vec::new(); 1 << r];
    for mask in 1u32..1 << r {
        let sub: Vec<ArcIndicator> = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| bag[i]).collect();
        cond[mask as usize] = support
            .iter()
            .map(|&(m, _)| {
                let oracle = ConditionalArcs { n, m };
                joint_cumulant(&oracle, &sub, limits).map(|k| to_f64(&k))
            })
            .collect::<Result<_>>()?;
    }
    let total_mass: f64 = support.iter().map(|s| s.1).sum();

    let mut rhs = 0.0;
    for term in lattice_terms(r).iter() {
        let blocks: Vec<u32> = term
            .blocks
            .iter()
            .map(|b| b.iter().fold(0u32, |acc, &i| acc | 1 << i))
            .collect();
        let outer = cumulant_from_subset_moments::<f64, _>(blocks.len(), |sel| {
            let e: f64 = support
                .iter()
                .enumerate()
                .map(|(k, &(_, p))| {
                    let prod: f64 = (0..blocks.len())
                        .filter(|b| sel >> b & 1 == 1)
                        .map(|b| cond[blocks[b] as usize][k])
                        .product();
                    p * prod
                })
                .sum();
            Ok(e / total_mass)
        })?;
        rhs += outer;
    }
    let lhs_f64 = to_f64(&lhs);
    let discrepancy = (lhs_f64 - rhs).abs();
    let tolerance = 10.0 * tail_tol * lhs_f64.abs() + 1e-9;
    Ok(TotalCumulanceReport {
        n,
        bag: bag.iter().map(ToString::to_string).collect(),
        lhs: crate::rational::to_pq(&lhs),
        lhs_f64,
        rhs,
        discrepancy,
        tolerance,
        pass: discrepancy < tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn ms(s: &str) -> Multiset {
        s.parse().unwrap()
    }
    fn x(i: usize, j: usize) -> MPermIndicator {
        MPermIndicator::new(i, j)
    }
    fn arc(i: usize, j: usize) -> ArcIndicator {
        ArcIndicator::new(i, j).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(joint_moment_mperm_closed(&ms("1^2,2^2,3"), &[x(1, 1)]).unwrap(), rat(2, 5));
        assert_eq!(joint_moment_mperm_closed(&ms("1,2"), &[x(1, 1), x(2, 1)]).unwrap(), rat(0, 1));
        assert_eq!(joint_moment_mperm_closed(&ms("1,2"), &[]).unwrap(), rat(1, 1));
        assert!(matches!(
            joint_moment_mperm_closed(&ms("1,2"), &[x(1, 1), x(1, 2)]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn bruteforce_examples() {
        let l = Limits::default();
        let f = Family::MPerm(ms("1,2"));
        assert_eq!(joint_moment_bruteforce(&f, &IndicatorBag::MPerm(vec![x(1, 1)]), &l).unwrap(), rat(1, 2));
        assert_eq!(
            joint_moment_bruteforce(&f, &IndicatorBag::MPerm(vec![x(1, 1), x(1, 2)]), &l).unwrap(),
            rat(0, 1)
        );
        let sp = Family::SetPart(2);
        assert_eq!(joint_moment_bruteforce(&sp, &IndicatorBag::Arcs(vec![arc(1, 2)]), &l).unwrap(), rat(1, 2));
        assert!(joint_moment_bruteforce(&sp, &IndicatorBag::MPerm(vec![x(1, 1)]), &l).is_err());
    }

    #[test]
    fn cumulant_examples() {
        let l = Limits::default();
        let o = WordEnumeration::new(&ms("1,2"), &l).unwrap();
        assert_eq!(joint_cumulant(&o, &[x(1, 1)], &l).unwrap(), rat(1, 2));
        assert_eq!(joint_cumulant(&o, &[x(1, 1), x(2, 1)], &l).unwrap(), rat(-1, 4));
        // Repeated indicator: kappa(X, X) = Var(X) for a 0/1 variable.
        assert_eq!(joint_cumulant(&o, &[x(1, 1), x(1, 1)], &l).unwrap(), rat(1, 4));
        let seven = vec![x(1, 1); 7];
        assert!(matches!(joint_cumulant(&o, &seven, &l), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn conditional_examples() {
        assert_eq!(cond_joint_moment_setpart(3, 2, &[arc(1, 3)]).unwrap(), rat(1, 4));
        assert_eq!(cond_joint_moment_setpart(2, 5, &[arc(1, 2)]).unwrap(), rat(1, 5));
        assert_eq!(cond_joint_moment_setpart(5, 4, &[arc(1, 3), arc(1, 4)]).unwrap(), rat(0, 1));
        assert_eq!(cond_joint_moment_setpart(5, 4, &[arc(1, 4), arc(2, 4)]).unwrap(), rat(0, 1));
        // Crossing: ball 2 must avoid the urn of ball 1.
        assert_eq!(cond_joint_moment_setpart(4, 3, &[arc(1, 3), arc(2, 4)]).unwrap(), rat(2, 27));
        assert_eq!(cond_joint_moment_setpart(4, 1, &[arc(1, 3), arc(2, 4)]).unwrap(), rat(0, 1));
        assert!(cond_joint_moment_setpart(4, 0, &[arc(1, 2)]).is_err());
    }

    /// Exhaustive average over all `m^n` urn assignments.
    fn urn_oracle(n: usize, m: usize, b: &[ArcIndicator]) -> Rational {
        let total = m.pow(n as u32);
        let mut hits = 0usize;
        let mut u = vec![0usize; n];
        for code in 0..total {
            let mut c = code;
            for slot in u.iter_mut() {
                *slot = c % m;
                c /= m;
            }
            let ok = b.iter().all(|a| {
                u[a.start - 1] == u[a.end - 1] && (a.start + 1..a.end).all(|g| u[g - 1] != u[a.start - 1])
            });
            hits += usize::from(ok);
        }
        Rational::new(BigInt::from(hits), BigInt::from(total))
    }

    #[test]
    fn conditional_formula_matches_urn_enumeration() {
        let n = 6;
        let all: Vec<ArcIndicator> = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| arc(i, j)))
            .collect();
        for m in 1..=4 {
            for (p, a) in all.iter().enumerate() {
                for b in &all[p..] {
                    for c in &all[p..] {
                        let bag = [*a, *b, *c];
                        assert_eq!(
                            cond_joint_moment_setpart(n, m, &bag).unwrap(),
                            urn_oracle(n, m, &normalize(&bag)),
                            "m={m} bag={bag:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn quasi_factor_examples() {
        let fact = |k: usize| Rational::from_integer(crate::combi::factorial(k as u64).into());
        let mut u = BTreeMap::new();
        for mask in 0u32..4 {
            u.insert(mask, fact(5 - mask.count_ones() as usize));
        }
        assert_eq!(quasi_fact_factor(&u, 0).unwrap(), fact(5));
        assert_eq!(quasi_fact_factor(&u, 3).unwrap(), rat(5, 4));
        for d in 0..4 {
            assert_eq!(quasi_fact_invert(&u, d).unwrap(), u[&d]);
        }
        let v = [rat(2, 3), rat(5, 7), rat(1, 9)];
        let mut mult = BTreeMap::new();
        for mask in 0u32..8 {
            let p = (0..3).filter(|i| mask >> i & 1 == 1).fold(rat(1, 1), |acc, i| acc * &v[i]);
            mult.insert(mask, p);
        }
        for d in [3u32, 5, 6, 7] {
            assert_eq!(quasi_fact_factor(&mult, d).unwrap(), rat(1, 1));
        }
        let mut zeros = BTreeMap::new();
        zeros.insert(0u32, rat(1, 1));
        zeros.insert(1u32, rat(0, 1));
        zeros.insert(2u32, rat(0, 1));
        zeros.insert(3u32, rat(0, 1));
        assert_eq!(quasi_fact_factor(&zeros, 3).unwrap(), rat(0, 1));
        zeros.insert(3u32, rat(1, 2));
        assert!(matches!(quasi_fact_factor(&zeros, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn total_cumulance_small() {
        let l = Limits::default();
        let r = total_cumulance_check(4, &[arc(1, 2)], 1e-15, &l).unwrap();
        // 5 of the 15 partitions of [4] contain the arc (1,2).
        assert_eq!(r.lhs, "1/3");
        assert!(r.pass, "{r:?}");
        for bag in [vec![arc(1, 2), arc(3, 4)], vec![arc(1, 3), arc(2, 4)]] {
            let r = total_cumulance_check(5, &bag, 1e-15, &l).unwrap();
            assert!(r.discrepancy < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn text_forms() {
        let v: Vec<MPermIndicator> = parse_list("1:1, 3:2").unwrap();
        assert_eq!(v, vec![x(1, 1), x(3, 2)]);
        let a: Vec<ArcIndicator> = parse_list("1-3,2-4").unwrap();
        assert_eq!(a[1].to_string(), "2-4");
        assert!(parse_list::<ArcIndicator>("3-1").is_err());
        assert!(parse_list::<MPermIndicator>("0:1").is_err());
    }
}
