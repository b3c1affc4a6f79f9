//! Weighted dependency graphs for indicator families and their bound parameters.
//!
//! A graph `G` with a weight functional `Psi` bounds cumulants through
//! `|kappa(B)| <= C_r Psi(B) MWST(G[B])`. This module builds the two concrete
//! graphs (`G^M` for letters at positions, `G^n` for arcs), the power graph
//! on monomials, the parameters `R` and `T_h`, and empirical scans for `C_r`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::combi::{
    binomial, elementary_symmetric, enumerate_multiset_perms, enumerate_set_partitions, ArcPattern, Multiset,
    PermPattern,
};
use crate::error::{check_cap, Error, Result};
use crate::limits::Limits;
use crate::moments::{
    arc_bit, joint_cumulant, ArcIndicator, Family, MPermClosedForm, MPermIndicator, MomentOracle,
    PartitionEnumeration,
};
use crate::patterns::{count_arc_pattern_u128, count_perm_pattern_u128, next_combination};
use crate::rational::{rat_int, to_pq, Rational};

/// Symmetric edge weights in `[0, 1]` on a vertex type; a missing edge weighs 0.
pub trait WeightedGraph {
    type Vertex: Clone + Ord + Hash + Debug;

    /// Weight of the edge between two distinct vertices.
    fn weight(&self, a: &Self::Vertex, b: &Self::Vertex) -> Rational;
}

/// A `Psi` functional on multisets of vertices.
pub trait Psi: WeightedGraph {
    fn psi(&self, bag: &[Self::Vertex]) -> Rational;
}

/// `G^M`: weight 1 at a shared position, `1/a_j` for a shared letter, `1/n` otherwise.
#[derive(Debug, Clone)]
pub struct MultisetGraph {
    m: Multiset,
}

#[allow(non_snake_case)]
pub fn build_gM(m: &Multiset) -> MultisetGraph {
    MultisetGraph { m: m.clone() }
}

impl MultisetGraph {
    pub fn multiset(&self) -> &Multiset {
        &self.m
    }

    /// All `n k` indicators `X_i^j`.
    pub fn vertices(&self) -> Vec<MPermIndicator> {
        (1..=self.m.n())
            .flat_map(|i| (1..=self.m.k()).map(move |j| MPermIndicator::new(i, j)))
            .collect()
    }
}

impl WeightedGraph for MultisetGraph {
    type Vertex = MPermIndicator;

    fn weight(&self, a: &MPermIndicator, b: &MPermIndicator) -> Rational {
        if a.pos == b.pos {
            rat_int(1)
        } else if a.value == b.value {
            Rational::new(1.into(), BigInt::from(self.m.multiplicity(a.value)))
        } else {
            Rational::new(1.into(), BigInt::from(self.m.n()))
        }
    }
}

impl Psi for MultisetGraph {
    fn psi(&self, bag: &[MPermIndicator]) -> Rational {
        psi_mperm(&self.m, bag)
    }
}

/// `G^n`: weight 1 for a shared start or a shared end, `1/n` otherwise.
#[derive(Debug, Clone, Copy)]
pub struct ArcGraph {
    n: usize,
}

#[allow(non_snake_case)]
pub fn build_gN(n: usize) -> Result<ArcGraph> {
    if n < 2 {
        return Err(Error::domain("G^n needs n >= 2"));
    }
    Ok(ArcGraph { n })
}

impl ArcGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> Vec<ArcIndicator> {
        (1..=self.n)
            .flat_map(|i| (i + 1..=self.n).map(move |j| ArcIndicator { start: i, end: j }))
            .collect()
    }
}

impl WeightedGraph for ArcGraph {
    type Vertex = ArcIndicator;

    fn weight(&self, a: &ArcIndicator, b: &ArcIndicator) -> Rational {
        if a.start == b.start || a.end == b.end {
            rat_int(1)
        } else {
            Rational::new(1.into(), BigInt::from(self.n))
        }
    }
}

impl Psi for ArcGraph {
    fn psi(&self, bag: &[ArcIndicator]) -> Rational {
        psi_setpart(self.n, bag)
    }
}

/// A graph on `0..v` given by an explicit weight table.
#[derive(Debug, Clone)]
pub struct ExplicitGraph {
    w: Vec<Vec<Rational>>,
}

impl ExplicitGraph {
    pub fn new(v: usize) -> Self {
        ExplicitGraph {
            w: vec![vec![Rational::zero(); v]; v],
        }
    }

    pub fn set(&mut self, a: usize, b: usize, w: Rational) -> Result<()> {
        if w.is_negative() || w > rat_int(1) {
            return Err(Error::domain(format!("edge weight {w} is outside [0, 1]")));
        }
        self.w[a][b] = w.clone();
        self.w[b][a] = w;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

impl WeightedGraph for ExplicitGraph {
    type Vertex = usize;
    fn weight(&self, a: &usize, b: &usize) -> Rational {
        self.w[*a][*b].clone()
    }
}

fn dedup<T: Clone + Ord>(xs: &[T]) -> Vec<T> {
    let mut v = xs.to_vec();
    v.sort();
    v.dedup();
    v
}

/// `prod a_j / n` over the distinct indicators of the bag.
pub fn psi_mperm(m: &Multiset, bag: &[MPermIndicator]) -> Rational {
    dedup(bag).iter().fold(rat_int(1), |acc, x| {
        acc * Rational::new(BigInt::from(m.multiplicity(x.value)), BigInt::from(m.n()))
    })
}

/// `n^{-#distinct arcs}`.
pub fn psi_setpart(n: usize, bag: &[ArcIndicator]) -> Rational {
    Rational::new(1.into(), BigInt::from(n).pow(dedup(bag).len() as u32))
}

/// Maximum product of edge weights over spanning trees of `G[dedup(B)]`:
/// 1 for a single vertex, 0 when disconnected. Greedy Kruskal on descending
/// weights is exact because weights lie in `[0, 1]`.
pub fn mwst<G: WeightedGraph>(g: &G, bag: &[G::Vertex]) -> Rational {
    let v = dedup(bag);
    if v.len() <= 1 {
        return rat_int(1);
    }
    let mut edges: Vec<(Rational, usize, usize)> = Vec::new();
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            let w = g.weight(&v[a], &v[b]);
            if w.is_positive() {
                edges.push((w, a, b));
            }
        }
    }
    edges.sort_by(|x, y| y.0.cmp(&x.0));
    let mut parent: Vec<usize> = (0..v.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut prod = rat_int(1);
    let mut joined = 0;
    for (w, a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            prod *= w;
            joined += 1;
        }
    }
    if joined + 1 == v.len() {
        prod
    } else {
        Rational::zero()
    }
}

/// `W(I, J)`: 1 when the monomials share an element, else the heaviest cross edge.
pub fn monomial_weight<G: WeightedGraph>(g: &G, i: &[G::Vertex], j: &[G::Vertex]) -> Rational {
    if i.iter().any(|x| j.contains(x)) {
        return rat_int(1);
    }
    let mut best = Rational::zero();
    for x in i {
        for y in j {
            let w = g.weight(x, y);
            if w > best {
                best = w;
            }
        }
    }
    best
}

/// The `d`-th power of a graph: vertices are multisets of size `1..=d`
/// (sorted vectors), edges weigh `W(I, J)`, and `Psi` lifts through unions.
#[derive(Debug, Clone)]
pub struct PowerGraph<G> {
    base: G,
    d: usize,
}

pub fn power_graph<G: WeightedGraph>(g: G, d: usize) -> Result<PowerGraph<G>> {
    if d == 0 {
        return Err(Error::domain("power graph degree must be at least 1"));
    }
    Ok(PowerGraph { base: g, d })
}

impl<G: WeightedGraph> PowerGraph<G> {
    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn base(&self) -> &G {
        &self.base
    }

    pub fn contains(&self, v: &[G::Vertex]) -> bool {
        !v.is_empty() && v.len() <= self.d
    }
}

impl<G: WeightedGraph> WeightedGraph for PowerGraph<G> {
    type Vertex = Vec<G::Vertex>;
    fn weight(&self, a: &Self::Vertex, b: &Self::Vertex) -> Rational {
        monomial_weight(&self.base, a, b)
    }
}

impl<G: Psi> Psi for PowerGraph<G> {
    fn psi(&self, bag: &[Self::Vertex]) -> Rational {
        let union: Vec<_> = bag.iter().flatten().cloned().collect();
        self.base.psi(&union)
    }
}

/// `2 C_2 R T_1`
pub fn variance_upper_bound(r: &Rational, t1: &Rational, c2: &Rational) -> Result<Rational> {
    if r.is_negative() || t1.is_negative() || c2.is_negative() {
        return Err(Error::domain("variance bound parameters must be nonnegative"));
    }
    Ok(rat_int(2) * c2 * r * t1)
}

/// The monomial family whose sum is a pattern count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FamilySpec {
    /// `prod_t X_{i_t}^{j_{tau(t)}}` over `i_1 < ... < i_l`, `j_1 < ... < j_l`.
    MPerm { m: Multiset, tau: PermPattern },
    /// `prod_{(i,j) in A} X_{s_i s_j}` over `s_1 < ... < s_l`.
    SetPart { n: usize, pattern: ArcPattern },
}

impl FamilySpec {
    pub fn pattern_len(&self) -> usize {
        match self {
            FamilySpec::MPerm { tau, .. } => tau.len(),
            FamilySpec::SetPart { pattern, .. } => pattern.len(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            FamilySpec::MPerm { m, .. } => m.n(),
            FamilySpec::SetPart { n, .. } => *n,
        }
    }
}

/// `R = sum_alpha Psi({alpha})`, closed form: `C(n,l) e_l(M) / n^l` or `C(n,l) n^{-a}`.
#[allow(non_snake_case)]
pub fn param_R(spec: &FamilySpec) -> Rational {
    match spec {
        FamilySpec::MPerm { m, tau } => {
            let l = tau.len();
            let num = binomial(m.n() as u64, l as u64) * elementary_symmetric(m, l);
            Rational::new(BigInt::from(num), BigInt::from(m.n()).pow(l as u32))
        }
        FamilySpec::SetPart { n, pattern } => {
            let num = binomial(*n as u64, pattern.len() as u64);
            Rational::new(BigInt::from(num), BigInt::from(*n).pow(pattern.arc_count() as u32))
        }
    }
}

/// Integer-scaled view of a monomial family: every weight is `w / d_w`, every
/// per-indicator `Psi` factor is `p / d_psi`.
struct ScaledFamily {
    members: Vec<Vec<u32>>,
    psi_num: Vec<u128>,
    d_psi: u128,
    d_w: u128,
    /// Members' common size.
    k: usize,
    kind: Kind,
}

enum Kind {
    /// `k` letters; id = `(pos - 1) * k + (value - 1)`.
    MPerm { k: usize, mult: Vec<u128>, n: u128 },
    /// arcs on `[n]`, id = bit index.
    SetPart { decode: Vec<(usize, usize)> },
}

impl ScaledFamily {
    fn build(spec: &FamilySpec) -> Self {
        match spec {
            FamilySpec::MPerm { m, tau } => {
                let (n, k, l) = (m.n(), m.k(), tau.len());
                let mult: Vec<u128> = m.multiplicities().iter().map(|&a| a as u128).collect();
                let d_w = mult.iter().fold(n as u128, |acc, &a| acc.lcm(&a));
                let psi_num = (0..n * k).map(|id| mult[id % k]).collect();
                let mut members = Vec::new();
                if l <= n && l <= k {
                    let mut pos: Vec<usize> = (0..l).collect();
                    loop {
                        let mut val: Vec<usize> = (0..l).collect();
                        loop {
                            let mut ids: Vec<u32> = (0..l)
                                .map(|t| (pos[t] * k + val[tau.values()[t] - 1]) as u32)
                                .collect();
                            ids.sort_unstable();
                            members.push(ids);
                            if !next_combination(&mut val, k) {
                                break;
                            }
                        }
                        if !next_combination(&mut pos, n) {
                            break;
                        }
                    }
                }
                ScaledFamily {
                    members,
                    psi_num,
                    d_psi: n as u128,
                    d_w,
                    k: l,
                    kind: Kind::MPerm { k, mult, n: n as u128 },
                }
            }
            FamilySpec::SetPart { n, pattern } => {
                let n = *n;
                let l = pattern.len();
                let mut decode = vec![(0, 0); n * n.saturating_sub(1) / 2];
                for i in 1..=n {
                    for j in i + 1..=n {
                        decode[arc_bit(n, &ArcIndicator { start: i, end: j }) as usize] = (i, j);
                    }
                }
                let mut members = Vec::new();
                if l <= n {
                    let mut s: Vec<usize> = (0..l).collect();
                    loop {
                        let mut ids: Vec<u32> = pattern
                            .arcs()
                            .iter()
                            .map(|&(i, j)| {
                                arc_bit(n, &ArcIndicator { start: s[i - 1] + 1, end: s[j - 1] + 1 })
                            })
                            .collect();
                        ids.sort_unstable();
                        members.push(ids);
                        if !next_combination(&mut s, n) {
                            break;
                        }
                    }
                }
                ScaledFamily {
                    members,
                    psi_num: vec![1; decode.len()],
                    d_psi: n as u128,
                    d_w: n as u128,
                    k: pattern.arc_count(),
                    kind: Kind::SetPart { decode },
                }
            }
        }
    }

    /// Weight numerator over `d_w` for two distinct base indicators.
    fn weight(&self, a: u32, b: u32) -> u128 {
        match &self.kind {
            Kind::MPerm { k, mult, n } => {
                let (pa, va) = (a as usize / k, a as usize % k);
                let (pb, vb) = (b as usize / k, b as usize % k);
                if pa == pb {
                    self.d_w
                } else if va == vb {
                    self.d_w / mult[va]
                } else {
                    self.d_w / n
                }
            }
            Kind::SetPart { decode } => {
                let (x, y) = (decode[a as usize], decode[b as usize]);
                if x.0 == y.0 || x.1 == y.1 {
                    self.d_w
                } else {
                    1
                }
            }
        }
    }

    /// `W({beta}, S) * Psi(S + beta) / Psi(S)`, scaled by `d_w d_psi^k`.
    fn term(&self, beta: &[u32], s: &[u32]) -> u128 {
        let mut shares = false;
        let mut factor: u128 = 1;
        let mut new = 0;
        for &b in beta {
            if s.binary_search(&b).is_ok() {
                shares = true;
            } else {
                factor *= self.psi_num[b as usize];
                new += 1;
            }
        }
        let w = if shares {
            self.d_w
        } else {
            beta.iter()
                .flat_map(|&b| s.iter().map(move |&x| (b, x)))
                .map(|(b, x)| self.weight(b, x))
                .max()
                .unwrap_or(0)
        };
        w * factor * self.d_psi.pow((self.k - new) as u32)
    }

    fn scale(&self) -> u128 {
        self.d_w * self.d_psi.pow(self.k as u32)
    }
}

/// Brute-force `R` as the sum of `Psi` over the monomial family.
#[allow(non_snake_case)]
pub fn param_R_bruteforce(spec: &FamilySpec) -> Rational {
    let fam = ScaledFamily::build(spec);
    let total: u128 = fam
        .members
        .iter()
        .map(|mem| mem.iter().map(|&id| fam.psi_num[id as usize]).product::<u128>())
        .sum();
    Rational::new(BigInt::from(total), BigInt::from(fam.d_psi.pow(fam.k as u32)))
}

const WORK_CAP: u128 = 200_000_000;

/// Exact `T_h` by scanning every `h`-multiset of monomials against every monomial.
#[allow(non_snake_case)]
pub fn param_Th_bruteforce(spec: &FamilySpec, h: usize) -> Result<Rational> {
    if h == 0 {
        return Err(Error::domain("T_h needs h >= 1"));
    }
    check_cap("T_h order", h, 2)?;
    check_cap("family size n", spec.size(), 8)?;
    let fam = ScaledFamily::build(spec);
    let f = fam.members.len();
    if f == 0 {
        return Ok(Rational::zero());
    }
    let tuples = if h == 1 { f as u128 } else { (f as u128) * (f as u128 + 1) / 2 };
    let work = tuples * f as u128;
    if work > WORK_CAP {
        return Err(Error::SizeLimit {
            what: "T_h tuple scan",
            size: work.min(usize::MAX as u128) as usize,
            cap: WORK_CAP as usize,
        });
    }
    let best = (0..f)
        .into_par_iter()
        .map(|a| {
            let firsts = &fam.members[a];
            let seconds: Vec<Option<usize>> = if h == 1 { vec![None] } else { (a..f).map(Some).collect() };
            seconds
                .into_iter()
                .map(|b| {
                    let mut s = firsts.clone();
                    if let Some(b) = b {
                        s.extend_from_slice(&fam.members[b]);
                        s.sort_unstable();
                        s.dedup();
                    }
                    fam.members.iter().map(|beta| fam.term(beta, &s)).sum::<u128>()
                })
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    Ok(Rational::new(BigInt::from(best), BigInt::from(fam.scale())))
}

/// Exact covariance of two monomials from the moment oracle of the family.
fn monomial_moments(spec: &FamilySpec, limits: &Limits) -> Result<Box<dyn Fn(&[u32]) -> Result<Rational> + Sync>> {
    match spec {
        FamilySpec::MPerm { m, .. } => {
            let k = m.k();
            let oracle = MPermClosedForm::new(m.clone());
            Ok(Box::new(move |ids: &[u32]| {
                let mut inds: Vec<MPermIndicator> = ids
                    .iter()
                    .map(|&id| MPermIndicator::new(id as usize / k + 1, id as usize % k + 1))
                    .collect();
                inds.sort_unstable();
                inds.dedup();
                oracle.moment(&inds)
            }))
        }
        FamilySpec::SetPart { n, .. } => {
            let n = *n;
            let oracle = PartitionEnumeration::new(n, limits)?;
            let mut decode = vec![(0, 0); n * n.saturating_sub(1) / 2];
            for i in 1..=n {
                for j in i + 1..=n {
                    decode[arc_bit(n, &ArcIndicator { start: i, end: j }) as usize] = (i, j);
                }
            }
            Ok(Box::new(move |ids: &[u32]| {
                let mut inds: Vec<ArcIndicator> = ids
                    .iter()
                    .map(|&id| {
                        let (i, j) = decode[id as usize];
                        ArcIndicator { start: i, end: j }
                    })
                    .collect();
                inds.sort_unstable();
                inds.dedup();
                oracle.moment(&inds)
            }))
        }
    }
}

/// Monomial-level `C_2`: the largest `|Cov(Y_a, Y_b)| / (Psi({a, b}) W(a, b))`
/// over all ordered pairs of monomials, including `a = b`.
pub fn estimate_c2_monomial(spec: &FamilySpec, limits: &Limits) -> Result<Rational> {
    let fam = ScaledFamily::build(spec);
    let f = fam.members.len();
    if (f as u128) * (f as u128) > WORK_CAP / 16 {
        return Err(Error::SizeLimit {
            what: "monomial pair scan",
            size: f * f,
            cap: (WORK_CAP / 16) as usize,
        });
    }
    let moment = monomial_moments(spec, limits)?;
    let singles: Vec<Rational> = fam.members.iter().map(|m| moment(m)).collect::<Result<_>>()?;
    let best = (0..f)
        .into_par_iter()
        .map(|a| -> Result<Rational> {
            let mut best = Rational::zero();
            for b in a..f {
                let mut u = fam.members[a].clone();
                u.extend_from_slice(&fam.members[b]);
                u.sort_unstable();
                u.dedup();
                let cov = moment(&u)? - &singles[a] * &singles[b];
                if cov.is_zero() {
                    continue;
                }
                let psi = Rational::new(
                    BigInt::from(u.iter().map(|&id| fam.psi_num[id as usize]).product::<u128>()),
                    BigInt::from(fam.d_psi.pow(u.len() as u32)),
                );
                let w = Rational::new(BigInt::from(fam.term_weight(&fam.members[a], &fam.members[b])), BigInt::from(fam.d_w));
                if w.is_zero() {
                    return Err(Error::BoundViolation(format!(
                        "monomials {a} and {b} have no edge but covariance {cov}"
                    )));
                }
                let ratio = cov.abs() / (psi * w);
                if ratio > best {
                    best = ratio;
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(best)
}

impl ScaledFamily {
    fn term_weight(&self, a: &[u32], b: &[u32]) -> u128 {
        if a.iter().any(|x| b.binary_search(x).is_ok()) {
            return self.d_w;
        }
        a.iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.weight(x, y))
            .max()
            .unwrap_or(0)
    }
}

/// Exact mean and variance of the pattern count by full enumeration.
pub fn exact_count_moments(spec: &FamilySpec, limits: &Limits) -> Result<(Rational, Rational)> {
    let counts: Vec<u128> = match spec {
        FamilySpec::MPerm { m, tau } => enumerate_multiset_perms(m, limits)?
            .map(|w| count_perm_pattern_u128(w.letters(), tau))
            .collect(),
        FamilySpec::SetPart { n, pattern } => enumerate_set_partitions(*n, limits)?
            .map(|p| {
                let arcs: Vec<(u32, u32)> = p.arcs().iter().map(|&(i, j)| (i as u32, j as u32)).collect();
                count_arc_pattern_u128(*n, &arcs, pattern)
            })
            .collect(),
    };
    let total = BigInt::from(counts.len());
    let s1: BigInt = counts.iter().map(|&c| BigInt::from(c)).sum();
    let s2: BigInt = counts.iter().map(|&c| BigInt::from(c) * BigInt::from(c)).sum();
    let mean = Rational::new(s1, total.clone());
    let var = Rational::new(s2, total) - &mean * &mean;
    Ok((mean, var))
}

/// Parameters of the monomial family behind a pattern count.
#[derive(Debug, Clone, Serialize)]
pub struct ParamReport {
    pub family: FamilySpec,
    /// `R` as `p/q`.
    #[serde(rename = "R")]
    pub r: String,
    /// `T_h` as `p/q`, keyed by `h`.
    #[serde(rename = "T")]
    pub t: BTreeMap<usize, String>,
    /// Growth scale `Q`: `e_{l-1}(M)` or `n^{l-a-1}`.
    #[serde(rename = "Q")]
    pub q: String,
    /// Monomial-level `C_2` estimate.
    pub c2: String,
    /// `2 C_2 R T_1`
    pub variance_upper: String,
    /// Exact `Var(Occ)` by enumeration.
    pub variance_exact: String,
    pub bound_holds: bool,
}

/// `R`, `T_1`, `T_2`, a `C_2` estimate, and the variance bound against the exact variance.
pub fn param_report(spec: &FamilySpec, limits: &Limits) -> Result<ParamReport> {
    let r = param_R(spec);
    let t1 = param_Th_bruteforce(spec, 1)?;
    let t2 = param_Th_bruteforce(spec, 2)?;
    let c2 = estimate_c2_monomial(spec, limits)?;
    let upper = variance_upper_bound(&r, &t1, &c2)?;
    let (_, var) = exact_count_moments(spec, limits)?;
    let q = match spec {
        FamilySpec::MPerm { m, tau } => rat_int(BigInt::from(elementary_symmetric(m, tau.len() - 1))),
        FamilySpec::SetPart { n, pattern } => {
            let e = pattern.len() as i64 - pattern.arc_count() as i64 - 1;
            if e >= 0 {
                rat_int(BigInt::from(*n).pow(e as u32))
            } else {
                Rational::new(1.into(), BigInt::from(*n).pow((-e) as u32))
            }
        }
    };
    Ok(ParamReport {
        family: spec.clone(),
        r: to_pq(&r),
        t: BTreeMap::from([(1, to_pq(&t1)), (2, to_pq(&t2))]),
        q: to_pq(&q),
        c2: to_pq(&c2),
        bound_holds: upper >= var,
        variance_upper: to_pq(&upper),
        variance_exact: to_pq(&var),
    })
}

/// Result of a `C_r` scan over all repetition-free bags of size `r`.
#[derive(Debug, Clone, Serialize)]
pub struct CrReport {
    pub family: String,
    pub r: usize,
    pub bags_scanned: usize,
    /// Largest `|kappa(B)| / (Psi(B) MWST(G[B]))` as `p/q`.
    pub max_ratio: String,
    #[serde(skip)]
    pub max_ratio_exact: Rational,
    pub argmax_bag: Vec<String>,
    /// Bags with `MWST = 0` and `kappa != 0`.
    pub violations: Vec<Vec<String>>,
}

impl CrReport {
    /// Turns recorded violations into a hard error.
    pub fn into_result(self) -> Result<Self> {
        if let Some(v) = self.violations.first() {
            return Err(Error::BoundViolation(format!("disconnected bag {v:?} has a nonzero cumulant")));
        }
        Ok(self)
    }
}

fn scan_bags<G, O>(g: &G, oracle: &O, vertices: &[G::Vertex], r: usize, limits: &Limits, label: String) -> Result<CrReport>
where
    G: Psi + Sync,
    O: MomentOracle<Ind = G::Vertex> + Sync,
    G::Vertex: Copy + Send + Sync + std::fmt::Display,
{
    let v = vertices.len();
    if r > v {
        return Err(Error::domain(format!("bag size {r} exceeds the {v} indicators")));
    }
    let mut combos = Vec::new();
    let mut c: Vec<usize> = (0..r).collect();
    loop {
        combos.push(c.clone());
        if !next_combination(&mut c, v) {
            break;
        }
    }
    type Acc<V> = (Rational, Option<Vec<V>>, Vec<Vec<V>>);
    let results: Vec<Acc<G::Vertex>> = combos
        .par_chunks(256)
        .map(|chunk| -> Result<Acc<G::Vertex>> {
            let mut best = Rational::zero();
            let mut arg = None;
            let mut bad = Vec::new();
            for idx in chunk {
                let bag: Vec<_> = idx.iter().map(|&i| vertices[i]).collect();
                let kappa = joint_cumulant(oracle, &bag, limits)?;
                let tree = mwst(g, &bag);
                if tree.is_zero() {
                    if !kappa.is_zero() {
                        bad.push(bag);
                    }
                    continue;
                }
                let ratio = kappa.abs() / (g.psi(&bag) * tree);
                if ratio > best || arg.is_none() {
                    best = ratio;
                    arg = Some(bag);
                }
            }
            Ok((best, arg, bad))
        })
        .collect::<Result<_>>()?;
    let mut best = Rational::zero();
    let mut arg = None;
    let mut violations = Vec::new();
    for (b, a, bad) in results {
        if a.is_some() && (arg.is_none() || b > best) {
            best = b;
            arg = a;
        }
        violations.extend(bad);
    }
    let show = |bag: &Vec<G::Vertex>| bag.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    Ok(CrReport {
        family: label,
        r,
        bags_scanned: combos.len(),
        max_ratio: to_pq(&best),
        max_ratio_exact: best,
        argmax_bag: arg.as_ref().map(show).unwrap_or_default(),
        violations: violations.iter().map(show).collect(),
    })
}

/// Empirical `C_r` for the base indicator family of `G^M` or `G^n`.
#[allow(non_snake_case)]
pub fn estimate_Cr(family: &Family, r: usize, limits: &Limits) -> Result<CrReport> {
    if !(2..=4).contains(&r) {
        return Err(Error::domain(format!("C_r scans take 2 <= r <= 4, got {r}")));
    }
    match family {
        Family::MPerm(m) => {
            check_cap("multiset size", m.n(), limits.word_len)?;
            let g = build_gM(m);
            let oracle = MPermClosedForm::new(m.clone());
            scan_bags(&g, &oracle, &g.vertices(), r, limits, format!("mperm {m}"))
        }
        Family::SetPart(n) => {
            let g = build_gN(*n)?;
            let oracle = PartitionEnumeration::new(*n, limits)?;
            scan_bags(&g, &oracle, &g.vertices(), r, limits, format!("setpart {n}"))
        }
    }
}

/// Rational to `f64` for reporting.
pub fn approx(r: &Rational) -> f64 {
    crate::rational::to_f64(r)
}
