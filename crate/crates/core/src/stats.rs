//! Normal CDF and chi-square tests.

use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl ChiSquare {
    fn from_stat(statistic: f64, df: usize) -> Self {
        let p_value = if df == 0 || statistic <= 0.0 { 1.0 } else { gamma_ur(df as f64 / 2.0, statistic / 2.0) };
        ChiSquare { statistic, df, p_value }
    }

    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Pearson goodness of fit of counts against cell probabilities.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(Error::domain("observed counts and probabilities must align"));
    }
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(probs) {
        if p <= 0.0 {
            return Err(Error::domain("cell probabilities must be positive"));
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
    }
    Ok(ChiSquare::from_stat(stat, observed.len() - 1))
}

/// Pearson test of independence on a contingency table; empty rows and columns are dropped.
pub fn chi_square_independence(table: &[Vec<u64>]) -> Result<ChiSquare> {
    let cols = table.first().map_or(0, |r| r.len());
    if table.iter().any(|r| r.len() != cols) {
        return Err(Error::domain("contingency table rows must have equal length"));
    }
    let row_sum: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_sum: Vec<u64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let total: u64 = row_sum.iter().sum();
    if total == 0 {
        return Err(Error::domain("empty contingency table"));
    }
    let mut stat = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &o) in r.iter().enumerate() {
            if row_sum[i] == 0 || col_sum[j] == 0 {
                continue;
            }
            let e = row_sum[i] as f64 * col_sum[j] as f64 / total as f64;
            stat += (o as f64 - e).powi(2) / e;
        }
    }
    let nr = row_sum.iter().filter(|&&s| s > 0).count();
    let nc = col_sum.iter().filter(|&&s| s > 0).count();
    Ok(ChiSquare::from_stat(stat, nr.saturating_sub(1) * nc.saturating_sub(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-11);
    }

    #[test]
    fn chi_square_known() {
        let r = chi_square_gof(&[50, 50], &[0.5, 0.5]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        // statistic 3.841 with one degree of freedom sits at p = 0.05
        let r = ChiSquare::from_stat(3.841458820694124, 1);
        assert!((r.p_value - 0.05).abs() < 1e-9);
        let ind = chi_square_independence(&[vec![10, 20], vec![20, 40]]).unwrap();
        assert!(ind.statistic.abs() < 1e-12 && ind.df == 1);
    }
}
