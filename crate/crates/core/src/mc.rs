//! Monte Carlo pipeline: sample, count, standardize, diagnose.
//!
//! Replica `k` draws from `ChaCha8` seeded with `replica_seed(seed, k)`, so a
//! run is bitwise reproducible for any thread count.
//!
//! The cumulant estimates are k-statistics. With power sums `S_p` and
//! central moments `m_p = (1/N) sum (x - mean)^p`:
//! `k_2 = N m_2 / (N-1)`, `k_3 = N^2 m_3 / ((N-1)(N-2))`,
//! `k_4 = N^2 ((N+1) m_4 - 3 (N-1) m_2^2) / ((N-1)(N-2)(N-3))`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::patterns::{count_arc_pattern_u128, count_perm_pattern_u128};
use crate::samplers::{replica_seed, rng_from_seed, sample_multiset_perm_with, stam_arcs_with, MUrnLaw};
use crate::stats::normal_cdf;
use crate::wdg::FamilySpec;

/// Tail tolerance of the urn law used for set-partition sampling.
pub const MC_TAIL_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McRun {
    pub family: FamilySpec,
    pub reps: usize,
    pub seed: u64,
    pub samples: Vec<u64>,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    #[serde(skip)]
    pub standardized: Vec<f64>,
}

/// Draws `reps` objects of the family and counts pattern occurrences in each.
pub fn run_mc(family: &FamilySpec, reps: usize, seed: u64) -> Result<McRun> {
    if reps < 100 {
        return Err(Error::precondition(format!("Monte Carlo needs at least 100 replicas, got {reps}")));
    }
    let to_u64 = |c: u128| u64::try_from(c).map_err(|_| Error::Precision("occurrence count exceeds u64".into()));
    let samples: Vec<u64> = match family {
        FamilySpec::MPerm { m, tau } => (0..reps as u64)
            .into_par_iter()
            .map(|k| {
                let mut rng = rng_from_seed(replica_seed(seed, k));
                let w = sample_multiset_perm_with(m, &mut rng);
                to_u64(count_perm_pattern_u128(w.letters(), tau))
            })
            .collect::<Result<_>>()?,
        FamilySpec::SetPart { n, pattern } => {
            let law = MUrnLaw::new(*n, MC_TAIL_TOL)?;
            (0..reps as u64)
                .into_par_iter()
                .map_init(Vec::new, |scratch, k| {
                    let mut rng = rng_from_seed(replica_seed(seed, k));
                    let arcs = stam_arcs_with(&law, &mut rng, scratch);
                    to_u64(count_arc_pattern_u128(*n, &arcs, pattern))
                })
                .collect::<Result<_>>()?
        }
    };
    let xs: Vec<f64> = samples.iter().map(|&s| s as f64).collect();
    let (mean, variance) = mean_var(&xs);
    let sd = variance.sqrt();
    let standardized = if sd > 0.0 {
        xs.iter().map(|x| (x - mean) / sd).collect()
    } else {
        vec![0.0; xs.len()]
    };
    Ok(McRun {
        family: family.clone(),
        reps,
        seed,
        samples,
        mean,
        variance,
        standardized,
    })
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

impl McRun {
    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance / self.reps as f64).sqrt()
    }

    pub fn summary(&self) -> Result<McSummary> {
        let ks = ks_distance(&self.standardized)?;
        let order = if self.reps >= 1000 { 4 } else { 3 };
        let k = empirical_cumulants(&self.standardized, order)?;
        Ok(McSummary {
            size: self.family.size(),
            mean: self.mean,
            variance: self.variance,
            ks,
            k3: k[2],
            k4: k.get(3).copied().unwrap_or(f64::NAN),
        })
    }
}

/// One CSV row of Monte Carlo diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McSummary {
    pub size: usize,
    pub mean: f64,
    pub variance: f64,
    pub ks: f64,
    pub k3: f64,
    pub k4: f64,
}

/// `sup_x |F_N(x) - Phi(x)|`.
pub fn ks_distance(sample: &[f64]) -> Result<f64> {
    if sample.len() < 100 {
        return Err(Error::precondition(format!("KS distance needs at least 100 points, got {}", sample.len())));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("sample contains NaN"));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // step over a run of ties: the ECDF jumps from i/N to j/N at this value
        let mut j = i;
        while j < xs.len() && xs[j] == xs[i] {
            j += 1;
        }
        let phi = normal_cdf(xs[i]);
        d = d.max((j as f64 / n - phi).abs()).max((phi - i as f64 / n).abs());
        i = j;
    }
    Ok(d.min(1.0))
}

/// k-statistics `k_1, ..., k_order` for `order <= 4`.
pub fn empirical_cumulants(sample: &[f64], order: usize) -> Result<Vec<f64>> {
    if !(1..=4).contains(&order) {
        return Err(Error::domain(format!("cumulant order must be 1..=4, got {order}")));
    }
    let need = if order == 4 { 1000 } else { order + 1 };
    if sample.len() < need {
        return Err(Error::precondition(format!(
            "order {order} k-statistics need at least {need} points, got {}",
            sample.len()
        )));
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let m = |p: i32| sample.iter().map(|x| (x - mean).powi(p)).sum::<f64>() / n;
    let (m2, m3, m4) = (m(2), m(3), m(4));
    let all = [
        mean,
        n * m2 / (n - 1.0),
        n * n * m3 / ((n - 1.0) * (n - 2.0)),
        n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0)),
    ];
    Ok(all[..order].to_vec())
}

/// Least-squares slope of `ln(variance)` against `ln(size)`.
pub fn variance_scaling_slope(sizes: &[f64], variances: &[f64]) -> Result<f64> {
    if sizes.len() != variances.len() {
        return Err(Error::domain("sizes and variances must align"));
    }
    if sizes.len() < 3 {
        return Err(Error::precondition("slope fit needs at least 3 points"));
    }
    if let Some(v) = variances.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::domain(format!("variance {v} is not positive")));
    }
    if sizes.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::domain("sizes must be positive"));
    }
    let xs: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = variances.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("sizes must not all be equal"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combi::Multiset;
    use rand::Rng;

    // Box-Muller
    fn gaussian(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        (0..n)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                let v: f64 = rng.random();
                (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
            })
            .collect()
    }

    #[test]
    fn determinism_and_mean() {
        let fam = FamilySpec::MPerm {
            m: Multiset::distinct(2).unwrap(),
            tau: "21".parse().unwrap(),
        };
        let a = run_mc(&fam, 2000, 7).unwrap();
        let b = run_mc(&fam, 2000, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.samples.iter().all(|&s| s <= 1));
        assert!((a.mean - 0.5).abs() < 3.0 * a.std_error());
        assert!(run_mc(&fam, 99, 7).is_err());
    }

    #[test]
    fn setpart_mean() {
        // arcs = n - blocks, and the 15 partitions of [4] have 37 blocks in total
        let fam = FamilySpec::SetPart {
            n: 4,
            pattern: "1-2".parse().unwrap(),
        };
        let run = run_mc(&fam, 20000, 11).unwrap();
        let exact = 4.0 - 37.0 / 15.0;
        assert!((run.mean - exact).abs() < 3.0 * run.std_error(), "{} {exact}", run.mean);
    }

    #[test]
    fn ks_examples() {
        let g = gaussian(10_000, 3);
        assert!(ks_distance(&g).unwrap() < 0.02);
        assert!(ks_distance(&vec![0.0; 200]).unwrap() >= 0.5);
        assert!(ks_distance(&[1.0; 10]).is_err());
    }

    #[test]
    fn k_statistics() {
        let g = gaussian(10_000, 5);
        let k = empirical_cumulants(&g, 4).unwrap();
        assert!(k[3].abs() < 0.15);
        assert!((k[1] - 1.0).abs() < 0.05);
        let sym: Vec<f64> = g.iter().flat_map(|&x| [x, -x]).collect();
        assert!(empirical_cumulants(&sym, 3).unwrap()[2].abs() < 1e-12);
        assert!(empirical_cumulants(&g[..500], 4).is_err());
    }

    #[test]
    fn slope() {
        let s = [2.0, 4.0, 8.0, 16.0];
        let v: Vec<f64> = s.iter().map(|x: &f64| 5.0 * x.powi(3)).collect();
        assert!((variance_scaling_slope(&s, &v).unwrap() - 3.0).abs() < 1e-12);
        assert!(variance_scaling_slope(&s, &[1.0, 0.0, 1.0, 1.0]).is_err());
    }
}
