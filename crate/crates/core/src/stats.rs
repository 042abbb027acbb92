//! Monte Carlo summaries with an order-fixed reduction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sum in a fixed binary-tree order, independent of how the values were
/// produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Monte Carlo estimate of an expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Standard error of the mean.
    pub sem: f64,
    pub n: usize,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_samples(xs: &[f64], seed: u64) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::domain("no samples"));
        }
        let n = xs.len();
        let mean = pairwise_sum(xs) / n as f64;
        let sem = if n > 1 {
            let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
            (pairwise_sum(&dev) / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Ok(McEstimate { mean, sem, n, seed })
    }

    /// `mean + k·sem`.
    pub fn upper(&self, k: f64) -> f64 {
        self.mean + k * self.sem
    }

    /// `mean - k·sem`.
    pub fn lower(&self, k: f64) -> f64 {
        self.mean - k * self.sem
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_known_samples() {
        let e = McEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0], 9).unwrap();
        assert_eq!(e.mean, 2.5);
        // sample variance 5/3, sem = sqrt(5/12)
        assert!((e.sem - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(e.n, 4);
        assert!(McEstimate::from_samples(&[], 0).is_err());
    }

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499500.0);
    }
}
