//! Conditional analysis of arc-pattern counts under Stam's urn model.
//!
//! Given the urn count `M = m`, the probability that positions `x` carry an
//! occurrence is an exact rational in `m`. Summing over positions gives
//! `E[Occ | M = m]`, which is computed both directly and through the gap
//! recursion `F`. Averages over `M` use the truncated float law.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::combi::{bell_number, binomial, factorial, ArcPattern};
use crate::error::{Error, Result};
use crate::moments::{cond_joint_moment_setpart, ArcIndicator};
use crate::patterns::next_combination;
use crate::rational::{rat_int, rat_uint, to_f64, to_pq, Rational};
use crate::samplers::MUrnLaw;

/// Largest `n` for which the direct position sum is run alongside the recursion.
pub const DIRECT_SUM_CAP: usize = 20;

/// Number of pattern arcs above each unit segment `[i-1, i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapProfile {
    /// `a_1, ..., a_l`; `a_1 = 0`.
    pub a: Vec<usize>,
    /// Number of nonzero entries.
    pub t: usize,
}

impl OverlapProfile {
    pub fn new(pattern: &ArcPattern) -> Self {
        let l = pattern.len();
        let a: Vec<usize> = (1..=l)
            .map(|i| pattern.arcs().iter().filter(|&&(p, q)| p < i && i <= q).count())
            .collect();
        let t = a.iter().filter(|&&x| x > 0).count();
        OverlapProfile { a, t }
    }

    /// The nonzero entries, in order.
    pub fn nonzero(&self) -> Vec<usize> {
        self.a.iter().copied().filter(|&x| x > 0).collect()
    }
}

/// Finite Laurent polynomial in `n` and `M` with rational coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<(i32, i32), Rational>,
}

impl LaurentPoly {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `c n^i M^j`.
    pub fn add_term(&mut self, n_pow: i32, m_pow: i32, c: Rational) {
        let e = self.terms.entry((n_pow, m_pow)).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(n_pow, m_pow));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i32, i32), &Rational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// Total degree in `(n, M)`, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<i32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn eval(&self, n: &Rational, m: &Rational) -> Result<Rational> {
        let pw = |x: &Rational, e: i32| -> Result<Rational> {
            if e >= 0 {
                Ok(num_traits::pow(x.clone(), e as usize))
            } else if x.is_zero() {
                Err(Error::domain("negative power of zero"))
            } else {
                Ok(num_traits::pow(x.recip(), (-e) as usize))
            }
        };
        let mut s = Rational::zero();
        for (&(i, j), c) in &self.terms {
            s += c * pw(n, i)? * pw(m, j)?;
        }
        Ok(s)
    }
}

fn embed(pattern: &ArcPattern, x: &[usize]) -> Vec<ArcIndicator> {
    pattern
        .arcs()
        .iter()
        .map(|&(i, j)| ArcIndicator { start: x[i - 1], end: x[j - 1] })
        .collect()
}

/// `P(x is an occurrence of the pattern | M = m)`.
pub fn cond_occurrence_prob(n: usize, m: usize, pattern: &ArcPattern, x: &[usize]) -> Result<Rational> {
    if x.len() != pattern.len() {
        return Err(Error::domain(format!(
            "position tuple has length {}, pattern has length {}",
            x.len(),
            pattern.len()
        )));
    }
    if x.windows(2).any(|w| w[0] >= w[1]) || x.first().is_some_and(|&v| v == 0) || x.last().is_some_and(|&v| v > n) {
        return Err(Error::domain(format!("positions {x:?} are not increasing in [{n}]")));
    }
    cond_joint_moment_setpart(n, m, &embed(pattern, x))
}

/// `E[Occ | M = m]` as the sum of occurrence probabilities over all position tuples.
pub fn cond_expectation_direct(n: usize, m: usize, pattern: &ArcPattern) -> Result<Rational> {
    if m == 0 {
        return Err(Error::domain("urn count must be at least 1"));
    }
    let l = pattern.len();
    if l > n {
        return Ok(Rational::zero());
    }
    crate::error::check_cap("direct conditional sum n", n, DIRECT_SUM_CAP)?;
    let mut c: Vec<usize> = (0..l).collect();
    let mut total = Rational::zero();
    loop {
        let x: Vec<usize> = c.iter().map(|v| v + 1).collect();
        total += cond_joint_moment_setpart(n, m, &embed(pattern, &x))?;
        if !next_combination(&mut c, n) {
            break;
        }
    }
    Ok(total)
}

/// Product over pattern points that end no arc of `(m - c(p)) / m`,
/// `c(p)` the number of arcs strictly over `p`; 0 once a factor is nonpositive.
pub fn r0(m: usize, pattern: &ArcPattern) -> Rational {
    let arcs = pattern.arcs();
    let mut r = Rational::one();
    for p in 1..=pattern.len() {
        if arcs.iter().any(|&(_, q)| q == p) {
            continue;
        }
        let c = arcs.iter().filter(|&&(i, j)| i < p && p < j).count();
        if c >= m {
            return Rational::zero();
        }
        r *= Rational::new(BigInt::from(m - c), BigInt::from(m));
    }
    r
}

/// `m^n F(n, m)` as an integer; gap ratios `(m - a)/m` are clamped at 0.
fn f_scaled(a: &[usize], l: usize, n: usize, m: usize) -> BigInt {
    let t = a.len();
    let mb = BigInt::from(m);
    // prev[N] = m^N F_{a_1..a_{s-1}; l-t+s-1}(N)
    let mut prev: Vec<BigInt> = Vec::with_capacity(n + 1);
    let mut mpow = BigInt::one();
    for big_n in 0..=n {
        prev.push(&mpow * BigInt::from(binomial(big_n as u64, (l - t) as u64)));
        mpow *= &mb;
    }
    for &ai in a {
        let w = BigInt::from(m.saturating_sub(ai));
        let mut cur = vec![BigInt::zero(); n + 1];
        for big_n in 1..=n {
            cur[big_n] = &mb * &prev[big_n - 1] + &w * &cur[big_n - 1];
        }
        prev = cur;
    }
    prev.pop().unwrap_or_default()
}

fn check_f_args(a: &[usize], l: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::domain("urn count must be at least 1"));
    }
    if a.len() > l {
        return Err(Error::domain(format!("{} overlaps exceed pattern length {l}", a.len())));
    }
    if a.contains(&0) {
        return Err(Error::domain("overlap list must hold positive integers"));
    }
    Ok(())
}

/// `F_{a_1..a_t; l}(n, m) = sum_{y_i >= 1, sum y <= n} C(n - sum y, l - t) prod (1 - a_i/m)^{y_i - 1}`,
/// by the recursion on the last gap.
pub fn f_function(a: &[usize], l: usize, n: usize, m: usize) -> Result<Rational> {
    check_f_args(a, l, m)?;
    Ok(Rational::new(f_scaled(a, l, n, m), BigInt::from(m).pow(n as u32)))
}

/// `F` by the nested sum over `y_1, ..., y_t`.
pub fn f_function_nested(a: &[usize], l: usize, n: usize, m: usize) -> Result<Rational> {
    check_f_args(a, l, m)?;
    let t = a.len();
    let ratios: Vec<Rational> = a
        .iter()
        .map(|&ai| Rational::new(BigInt::from(m.saturating_sub(ai)), BigInt::from(m)))
        .collect();
    fn go(i: usize, left: usize, ratios: &[Rational], free: u64, acc: Rational, out: &mut Rational) {
        if i == ratios.len() {
            *out += acc * rat_uint(&binomial(left as u64, free));
            return;
        }
        let mut pw = acc;
        for y in 1..=left {
            go(i + 1, left - y, ratios, free, pw.clone(), out);
            pw *= &ratios[i];
        }
    }
    let mut out = Rational::zero();
    go(0, n, &ratios, (l - t) as u64, Rational::one(), &mut out);
    Ok(out)
}

/// `E[Occ | M = m]` through the gap substitution: `R_0(m) m^{-a} F(nonzero a_i; l)(n, m)`.
pub fn cond_expectation_factored(n: usize, m: usize, pattern: &ArcPattern) -> Result<Rational> {
    if m == 0 {
        return Err(Error::domain("urn count must be at least 1"));
    }
    let l = pattern.len();
    if l > n {
        return Ok(Rational::zero());
    }
    let r = r0(m, pattern);
    if r.is_zero() {
        return Ok(r);
    }
    let prof = OverlapProfile::new(pattern);
    let f = f_scaled(&prof.nonzero(), l, n, m);
    let den = BigInt::from(m).pow((n + pattern.arc_count()) as u32);
    Ok(r * Rational::new(f, den))
}

/// `E[Occ | M = m]`. Up to `n = 20` the direct sum is computed as well and must match.
pub fn cond_expectation_exact(n: usize, m: usize, pattern: &ArcPattern) -> Result<Rational> {
    let fast = cond_expectation_factored(n, m, pattern)?;
    if n <= DIRECT_SUM_CAP {
        let slow = cond_expectation_direct(n, m, pattern)?;
        if slow != fast {
            return Err(Error::BoundViolation(format!(
                "conditional expectation paths disagree at n={n}, m={m}: {} vs {}",
                to_pq(&slow),
                to_pq(&fast)
            )));
        }
    }
    Ok(fast)
}

/// The dominant part of `F`:
/// `sum_{j_0+..+j_t = l-t} (-1)^{j_1+..+j_t} n^{j_0} M^{j_1+..+j_t+t} / (j_0! prod a_i^{j_i+1})`.
pub fn leading_term_poly(a: &[usize], l: usize) -> Result<LaurentPoly> {
    check_f_args(a, l, 1)?;
    let t = a.len();
    let mut poly = LaurentPoly::new();
    let mut j = vec![0usize; t + 1];
    fn compositions(i: usize, left: usize, j: &mut Vec<usize>, a: &[usize], poly: &mut LaurentPoly) {
        if i + 1 == j.len() {
            j[i] = left;
            let rest: usize = j[1..].iter().sum();
            let mut den = BigInt::from(factorial(j[0] as u64));
            for (ai, ji) in a.iter().zip(&j[1..]) {
                den *= BigInt::from(*ai).pow(*ji as u32 + 1);
            }
            let sign = if rest.is_multiple_of(2) { 1 } else { -1 };
            poly.add_term(j[0] as i32, (rest + a.len()) as i32, Rational::new(BigInt::from(sign), den));
            return;
        }
        for v in 0..=left {
            j[i] = v;
            compositions(i + 1, left - v, j, a, poly);
        }
    }
    compositions(0, l - t, &mut j, a, &mut poly);
    Ok(poly)
}

pub fn leading_term(a: &[usize], l: usize, n: usize, m: usize) -> Result<Rational> {
    check_f_args(a, l, m)?;
    leading_term_poly(a, l)?.eval(&rat_int(n), &rat_int(m))
}

/// `E[M^r]` over the truncated law.
pub fn moment_m(n: usize, r: i32, tail_tol: f64) -> Result<f64> {
    let law = MUrnLaw::new(n, tail_tol)?;
    let v = law.expect(|m| (m as f64).powi(r));
    if !v.is_finite() {
        return Err(Error::Precision(format!("E[M^{r}] overflows for n={n}")));
    }
    Ok(v)
}

/// `B_{n+r} / B_n`.
pub fn moment_m_exact(n: usize, r: usize) -> Rational {
    Rational::new(BigInt::from(bell_number(n + r)), BigInt::from(bell_number(n)))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub n: usize,
    /// `E[M]`
    pub m_n: f64,
    pub sigma_n: f64,
    /// `n^{3/4}`
    pub window: f64,
    /// `P(|M - m_n| > n^{3/4})`, including the certified tail bound.
    pub p_outside: f64,
    /// `m_n / (n / ln n)`
    pub ratio_to_n_over_ln_n: f64,
}

pub fn concentration_probe(n: usize, tail_tol: f64) -> Result<ConcentrationReport> {
    if n < 2 {
        return Err(Error::domain("concentration probe needs n >= 2"));
    }
    let law = MUrnLaw::new(n, tail_tol)?;
    let window = (n as f64).powf(0.75);
    let mean = law.mean();
    let inside_far: f64 = law
        .support()
        .filter(|&(m, _)| (m as f64 - mean).abs() > window)
        .map(|(_, p)| p)
        .sum();
    Ok(ConcentrationReport {
        n,
        m_n: mean,
        sigma_n: law.sd(),
        window,
        p_outside: inside_far + law.tail_bound(),
        ratio_to_n_over_ln_n: mean / (n as f64 / (n as f64).ln()),
    })
}

/// One row of the conditional expectation table.
#[derive(Debug, Clone, Serialize)]
pub struct CondExpRow {
    pub m: usize,
    pub prob: f64,
    pub expectation: f64,
    /// Exact `E[Occ | M = m]` as `p/q`.
    pub expectation_exact: String,
}

/// `(m, P(M = m), E[Occ | M = m])` over the truncated window, ascending in `m`.
pub fn cond_exp_table(n: usize, pattern: &ArcPattern, tail_tol: f64) -> Result<Vec<CondExpRow>> {
    let law = MUrnLaw::new(n, tail_tol)?;
    let support: Vec<(usize, f64)> = law.support().collect();
    support
        .par_iter()
        .map(|&(m, p)| {
            let e = if n <= DIRECT_SUM_CAP {
                cond_expectation_exact(n, m, pattern)?
            } else {
                cond_expectation_factored(n, m, pattern)?
            };
            Ok(CondExpRow {
                m,
                prob: p,
                expectation: to_f64(&e),
                expectation_exact: to_pq(&e),
            })
        })
        .collect()
}

fn cond_values(law: &MUrnLaw, pattern: &ArcPattern) -> Result<Vec<(f64, f64)>> {
    let n = law.n();
    let support: Vec<(usize, f64)> = law.support().collect();
    support
        .par_iter()
        .map(|&(m, p)| Ok((p, to_f64(&cond_expectation_factored(n, m, pattern)?))))
        .collect()
}

/// `E[Occ] = sum_m P(M = m) E[Occ | M = m]`.
pub fn mean_from_conditionals(n: usize, pattern: &ArcPattern, tail_tol: f64) -> Result<f64> {
    let law = MUrnLaw::new(n, tail_tol)?;
    let vals = cond_values(&law, pattern)?;
    Ok(vals.iter().map(|(p, e)| p * e).sum::<f64>() / law.total_mass())
}

/// `Var(E[Occ | M])` over the truncated law, summed in ascending `m`.
pub fn var_cond_expectation(n: usize, pattern: &ArcPattern, tail_tol: f64) -> Result<f64> {
    if n < pattern.len() {
        return Ok(0.0);
    }
    let law = MUrnLaw::new(n, tail_tol)?;
    let vals = cond_values(&law, pattern)?;
    let mass = law.total_mass();
    let mean = vals.iter().map(|(p, e)| p * e).sum::<f64>() / mass;
    let var = vals.iter().map(|(p, e)| p * (e - mean).powi(2)).sum::<f64>() / mass;
    if !var.is_finite() {
        return Err(Error::Precision(format!("conditional variance overflows at n={n}")));
    }
    Ok(var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combi::{enumerate_set_partitions, ArcPattern};
    use crate::limits::Limits;
    use crate::patterns::count_arc_pattern;
    use crate::rational::rat;

    fn pat(s: &str) -> ArcPattern {
        s.parse().unwrap()
    }

    #[test]
    fn overlap_profile() {
        let p = OverlapProfile::new(&pat("1-3,2-4"));
        assert_eq!(p.a, vec![0, 1, 2, 1]);
        assert_eq!(p.t, 3);
        assert_eq!(OverlapProfile::new(&pat("1-2")).a, vec![0, 1]);
    }

    #[test]
    fn occurrence_prob_examples() {
        assert_eq!(cond_occurrence_prob(2, 3, &pat("1-2"), &[1, 2]).unwrap(), rat(1, 3));
        assert_eq!(cond_occurrence_prob(3, 2, &pat("1-2"), &[1, 3]).unwrap(), rat(1, 4));
        assert_eq!(cond_occurrence_prob(4, 1, &pat("1-3,2-4"), &[1, 2, 3, 4]).unwrap(), rat(0, 1));
        assert!(cond_occurrence_prob(4, 2, &pat("1-2"), &[2, 1]).is_err());
    }

    #[test]
    fn cond_expectation_examples() {
        assert_eq!(cond_expectation_exact(3, 2, &pat("1-2")).unwrap(), rat(5, 4));
        for m in 1..6 {
            assert_eq!(cond_expectation_exact(2, m, &pat("1-2")).unwrap(), rat(1, m as i64));
        }
        assert_eq!(cond_expectation_exact(3, 2, &pat("1-3,2-4")).unwrap(), rat(0, 1));
    }

    #[test]
    fn paths_agree() {
        for p in ["1-2", "1-3", "1-3,2-4", "1-4,2-3", "1-2,2-3", "1-2,3-4", "1-4", "2-3:4", ":2"] {
            for n in 0..=12 {
                for m in 1..=8 {
                    let p = pat(p);
                    assert_eq!(
                        cond_expectation_direct(n, m, &p).unwrap(),
                        cond_expectation_factored(n, m, &p).unwrap(),
                        "{p} n={n} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_function(&[], 3, 7, 4).unwrap(), rat(35, 1));
        assert_eq!(f_function(&[3], 3, 7, 3).unwrap(), rat(15, 1));
        assert_eq!(f_function(&[1], 1, 3, 2).unwrap(), rat(7, 4));
        for a in [vec![1], vec![2, 1], vec![1, 2, 3]] {
            for l in a.len()..a.len() + 2 {
                for n in 0..10 {
                    for m in 1..6 {
                        assert_eq!(f_function(&a, l, n, m).unwrap(), f_function_nested(&a, l, n, m).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn leading_term_examples() {
        assert_eq!(leading_term(&[], 3, 6, 2).unwrap(), rat(36, 1));
        assert_eq!(leading_term(&[1, 2], 2, 100, 5).unwrap(), rat(25, 2));
        let poly = leading_term_poly(&[1, 2, 1], 4).unwrap();
        assert_eq!(poly.degree(), Some(4));
    }

    #[test]
    fn bell_moment_ratios() {
        assert_eq!(moment_m_exact(5, 1), rat(203, 52));
        assert_eq!(moment_m_exact(5, 2), rat(877, 52));
        assert!((moment_m(5, 0, 1e-15).unwrap() - 1.0).abs() < 1e-12);
        let v = moment_m(5, 1, 1e-15).unwrap();
        assert!((v / (203.0 / 52.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn concentration() {
        let rep = concentration_probe(100, 1e-15).unwrap();
        assert!(rep.sigma_n > 0.0 && rep.m_n.is_finite());
        assert!(rep.p_outside < 1e-6, "{rep:?}");
    }

    #[test]
    fn tower_property_small() {
        let limits = Limits::default();
        for n in [4usize, 6] {
            for p in ["1-2", "1-3,2-4"] {
                let p = pat(p);
                let mut total = BigInt::zero();
                for part in enumerate_set_partitions(n, &limits).unwrap() {
                    total += BigInt::from(count_arc_pattern(&part, &p));
                }
                let exact = to_f64(&Rational::new(total, BigInt::from(bell_number(n))));
                let via = mean_from_conditionals(n, &p, 1e-15).unwrap();
                assert!((via - exact).abs() <= 1e-9 * exact.max(1e-300), "{n} {p}: {via} {exact}");
            }
        }
        assert_eq!(var_cond_expectation(3, &pat("1-3,2-4"), 1e-12).unwrap(), 0.0);
    }
}
