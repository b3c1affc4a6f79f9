//! Uniform samplers: shuffled multiset permutations and Stam's urn model.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combi::{bell_number, Multiset, SetPartition, Word};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

/// Odd constant of the golden ratio, used to spread replica indices.
pub const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(SEED_STRIDE);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica `k` under master seed `master`:
/// `splitmix64(master + k * 0x9E3779B97F4A7C15)`.
pub fn replica_seed(master: u64, k: u64) -> u64 {
    splitmix64(master.wrapping_add(k.wrapping_mul(SEED_STRIDE)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sample_multiset_perm(m: &Multiset, seed: u64) -> Word {
    sample_multiset_perm_with(m, &mut rng_from_seed(seed))
}

/// Fisher-Yates over the sorted word.
pub fn sample_multiset_perm_with<R: Rng + ?Sized>(m: &Multiset, rng: &mut R) -> Word {
    let mut letters = m.sorted_word().letters().to_vec();
    letters.shuffle(rng);
    Word::new(letters).expect("letters come from a multiset")
}

/// Law of the urn count `M`, `P(M = m) = m^n / (e m! B_n)`, truncated to a
/// contiguous window whose omitted mass is below the requested tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct MUrnLaw {
    n: usize,
    #[serde(serialize_with = "ser_biguint")]
    bell_n: BigUint,
    m_min: usize,
    weights: Vec<f64>,
    cdf: Vec<f64>,
    /// Certified upper bound on the omitted mass.
    tail_bound: f64,
    tail_tol: f64,
    mean: f64,
    sd: f64,
}

fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn murn_law(n: usize, tail_tol: f64) -> Result<MUrnLaw> {
    MUrnLaw::new(n, tail_tol)
}

impl MUrnLaw {
    pub fn new(n: usize, tail_tol: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("urn law needs n >= 1"));
        }
        if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
            return Err(Error::domain(format!("tail_tol must lie in (0, 1e-6], got {tail_tol}")));
        }
        if tail_tol < 1e-290 {
            return Err(Error::Precision(format!(
                "tail_tol {tail_tol:e} is below what double precision can certify"
            )));
        }
        let bell_n = bell_number(n);
        let inv_e = (-1.0f64).exp();
        let log_w = |m: usize| n as f64 * (m as f64).ln() - statrs::function::gamma::ln_gamma(m as f64 + 1.0);
        // Unimodal in m: walk up to the mode.
        let mut mode = 1;
        while log_w(mode + 1) >= log_w(mode) {
            mode += 1;
        }
        let bell_int = BigInt::from(bell_n.clone());
        let exact = |m: usize| -> f64 {
            let num = BigInt::from(BigUint::from(m).pow(n as u32));
            let den = BigInt::from(crate::combi::factorial(m as u64)) * &bell_int;
            to_f64(&Rational::new(num, den)) * inv_e
        };
        let half = tail_tol / 2.0;

        let mut right = vec![exact(mode)];
        let mut m = mode;
        let right_bound = loop {
            let cur = *right.last().expect("nonempty");
            let next = exact(m + 1);
            let q = next / cur;
            // Log-concavity: later ratios are no larger than q.
            if q < 1.0 && next / (1.0 - q) < half {
                break next / (1.0 - q);
            }
            if m > 64 * n + 64 || !next.is_finite() {
                return Err(Error::Precision(format!("right tail of the urn law for n={n} not certified")));
            }
            right.push(next);
            m += 1;
        };

        let mut left = Vec::new();
        let mut lo = mode;
        let left_bound = loop {
            if lo == 1 {
                break 0.0;
            }
            let cur = left.last().copied().unwrap_or(right[0]);
            let prev = exact(lo - 1);
            let q = prev / cur;
            // Going left the ratios only shrink; the tail is dominated by a geometric series.
            if q < 1.0 && prev / (1.0 - q) < half {
                break prev / (1.0 - q);
            }
            if prev == 0.0 && cur == 0.0 {
                return Err(Error::Precision(format!("left tail of the urn law for n={n} not certified")));
            }
            left.push(prev);
            lo -= 1;
        };

        left.reverse();
        let weights: Vec<f64> = left.into_iter().chain(right).collect();
        let mut acc = 0.0;
        let cdf: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        let total = acc;
        let mean = weights.iter().enumerate().map(|(i, w)| (lo + i) as f64 * w).sum::<f64>() / total;
        let var = weights
            .iter()
            .enumerate()
            .map(|(i, w)| ((lo + i) as f64 - mean).powi(2) * w)
            .sum::<f64>()
            / total;
        Ok(MUrnLaw {
            n,
            bell_n,
            m_min: lo,
            weights,
            cdf,
            tail_bound: left_bound + right_bound,
            tail_tol,
            mean,
            sd: var.sqrt(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bell_n(&self) -> &BigUint {
        &self.bell_n
    }

    pub fn m_min(&self) -> usize {
        self.m_min
    }

    pub fn m_max(&self) -> usize {
        self.m_min + self.weights.len() - 1
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Certified bound on the mass outside `[m_min, m_max]`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `P(M = m)`, 0 outside the window.
    pub fn prob(&self, m: usize) -> f64 {
        if m < self.m_min {
            0.0
        } else {
            self.weights.get(m - self.m_min).copied().unwrap_or(0.0)
        }
    }

    /// `(m, P(M = m))` in ascending `m`.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().enumerate().map(|(i, &w)| (self.m_min + i, w))
    }

    /// Sum of the retained weights.
    pub fn total_mass(&self) -> f64 {
        *self.cdf.last().expect("window is nonempty")
    }

    /// Mean `m_n` of the truncated law.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard deviation `sigma_n` of the truncated law.
    pub fn sd(&self) -> f64 {
        self.sd
    }

    /// `sum_m P(M=m) f(m)` renormalized over the window, summed in ascending `m`.
    pub fn expect(&self, mut f: impl FnMut(usize) -> f64) -> f64 {
        let s: f64 = self.support().map(|(m, w)| w * f(m)).sum();
        s / self.total_mass()
    }

    /// Dobinski's sum `sum_m m^n / (e m!)` over the window, which approximates `B_n`.
    pub fn dobinski_sum(&self) -> f64 {
        self.total_mass() * self.bell_n.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Inverse-CDF draw of `M`.
    pub fn sample_m<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.total_mass();
        let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.m_min + i
    }
}

/// One run of Stam's urn model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StamDraw {
    pub partition: SetPartition,
    pub urn_count: usize,
    pub empty_urns: usize,
    /// 0-based urn of each ball.
    pub urn_assignment: Vec<u32>,
}

pub fn sample_stam(n: usize, law: &MUrnLaw, seed: u64) -> Result<StamDraw> {
    sample_stam_with(n, law, &mut rng_from_seed(seed))
}

pub fn sample_stam_with<R: Rng + ?Sized>(n: usize, law: &MUrnLaw, rng: &mut R) -> Result<StamDraw> {
    if n != law.n() {
        return Err(Error::precondition(format!("urn law was built for n={}, not {n}", law.n())));
    }
    let m = law.sample_m(rng);
    let urn_assignment: Vec<u32> = (0..n).map(|_| rng.random_range(0..m as u32)).collect();
    let partition = SetPartition::from_labels(&urn_assignment);
    let empty_urns = m - partition.num_blocks();
    Ok(StamDraw {
        partition,
        urn_count: m,
        empty_urns,
        urn_assignment,
    })
}

/// Arcs of a Stam draw without materializing blocks: ball `i` links to the
/// previous ball that landed in its urn. Returned sorted by start.
pub fn stam_arcs_with<R: Rng + ?Sized>(law: &MUrnLaw, rng: &mut R, scratch: &mut Vec<u32>) -> Vec<(u32, u32)> {
    let n = law.n();
    let m = law.sample_m(rng);
    scratch.clear();
    scratch.resize(m, 0);
    let mut arcs = Vec::with_capacity(n);
    for i in 1..=n as u32 {
        let u = rng.random_range(0..m);
        if scratch[u] != 0 {
            arcs.push((scratch[u], i));
        }
        scratch[u] = i;
    }
    arcs.sort_unstable();
    arcs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_one_is_shifted_poisson() {
        let law = murn_law(1, 1e-12).unwrap();
        for (m, p) in law.support() {
            let f: f64 = (1..m).map(|x| x as f64).product();
            let expect = (-1.0f64).exp() / f;
            assert!((p - expect).abs() < 1e-15 * expect.max(1e-300), "m={m}");
        }
        assert!((law.mean() - 2.0).abs() < 1e-10);
        assert!(law.total_mass() >= 1.0 - 1e-12 && law.total_mass() <= 1.0 + 1e-15);
    }

    #[test]
    fn normalization_and_bounds() {
        for n in [2, 5, 17, 40, 120, 500] {
            let law = murn_law(n, 1e-12).unwrap();
            assert!(law.tail_bound() < 1e-12);
            assert!((law.total_mass() - 1.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn bad_tolerances() {
        assert!(matches!(murn_law(5, 1e-3), Err(Error::Domain(_))));
        assert!(matches!(murn_law(5, 0.0), Err(Error::Domain(_))));
        assert!(matches!(murn_law(5, 1e-300), Err(Error::Precision(_))));
        assert!(murn_law(0, 1e-9).is_err());
    }

    #[test]
    fn trivial_samples() {
        let one = Multiset::new(vec![1]).unwrap();
        assert_eq!(sample_multiset_perm(&one, 3).to_string(), "1");
        let two = Multiset::new(vec![2]).unwrap();
        for s in 0..20 {
            assert_eq!(sample_multiset_perm(&two, s).to_string(), "11");
        }
        let law = murn_law(1, 1e-9).unwrap();
        for s in 0..20 {
            assert_eq!(sample_stam(1, &law, s).unwrap().partition.to_string(), "{1}");
        }
        assert!(sample_stam(2, &law, 0).is_err());
    }

    #[test]
    fn two_letter_uniformity() {
        let m = Multiset::distinct(2).unwrap();
        let mut rng = rng_from_seed(11);
        let hits = (0..100_000)
            .filter(|_| sample_multiset_perm_with(&m, &mut rng).letters()[0] == 1)
            .count();
        assert!((hits as f64 / 1e5 - 0.5).abs() < 0.01);
    }

    #[test]
    fn draws_are_consistent() {
        let law = murn_law(9, 1e-12).unwrap();
        for s in 0..50 {
            let d = sample_stam(9, &law, s).unwrap();
            assert_eq!(d, sample_stam(9, &law, s).unwrap());
            let again = SetPartition::from_labels(&d.urn_assignment);
            assert_eq!(again, d.partition);
            assert_eq!(d.empty_urns + d.partition.num_blocks(), d.urn_count);
        }
    }

    #[test]
    fn fast_arcs_match_partition_arcs() {
        let law = murn_law(30, 1e-12).unwrap();
        let mut scratch = Vec::new();
        let mut a = rng_from_seed(5);
        let mut b = rng_from_seed(5);
        for _ in 0..20 {
            let fast = stam_arcs_with(&law, &mut a, &mut scratch);
            let slow = sample_stam_with(30, &law, &mut b).unwrap().partition.arcs();
            let slow: Vec<(u32, u32)> = slow.into_iter().map(|(i, j)| (i as u32, j as u32)).collect();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn replica_seeds_differ() {
        let s: std::collections::HashSet<u64> = (0..1000).map(|k| replica_seed(7, k)).collect();
        assert_eq!(s.len(), 1000);
        assert_eq!(replica_seed(7, 3), replica_seed(7, 3));
    }
}
