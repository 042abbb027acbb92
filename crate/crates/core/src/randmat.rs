//! Reproducible Gaussian and Haar random matrices.
//!
//! Every Monte Carlo loop in the crate draws sample `i` from its own
//! substream `rng.substream(i)`, so results do not depend on how samples are
//! scheduled across threads. Gaussian scalars come from Box–Muller on top of
//! ChaCha8; the bit-exact contract holds for IEEE-754 doubles with
//! round-to-nearest and a correctly rounded `ln`/`sin`/`cos`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{householder_qr, CMatrix, UnitaryMatrix};
use crate::stats::McEstimate;

/// A (seed, stream) pair naming an independent random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededRng {
    pub seed: u64,
    pub stream: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        SeededRng { seed, stream }
    }

    /// Generator for this (seed, stream).
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Independent child stream for task `index`; a pure function of
    /// `(self, index)`.
    pub fn substream(&self, index: u64) -> SeededRng {
        SeededRng {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(index.wrapping_add(1))),
        }
    }
}

/// A pair of independent standard normals by Box–Muller.
pub fn standard_normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // gen::<f64>() is in [0, 1); shift u1 into (0, 1]
    let u1 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    (r * t.cos(), r * t.sin())
}

/// Complex Gaussian matrix with iid entries, real and imaginary parts
/// independent `N(0, 1/(2d))`, so `E|g_ij|² = 1/d`.
pub fn gaussian_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let s = (0.5 / d as f64).sqrt();
    CMatrix::from_fn(d, |_, _| {
        let (a, b) = standard_normal_pair(rng);
        Complex64::new(a * s, b * s)
    })
}

const HAAR_ATTEMPTS: usize = 3;

/// Haar-distributed unitary: QR of a Ginibre matrix, with column `k` of `Q`
/// multiplied by the phase `r_kk / |r_kk|`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    for _ in 0..HAAR_ATTEMPTS {
        let g = gaussian_matrix(d, rng);
        let (mut q, r) = householder_qr(&g);
        let scale = (0..d).map(|k| r[(k, k)].norm()).fold(0.0, f64::max);
        if (0..d).any(|k| r[(k, k)].norm() <= 1e-12 * scale) {
            continue;
        }
        for k in 0..d {
            let phase = r[(k, k)] / r[(k, k)].norm();
            for i in 0..d {
                q[(i, k)] *= phase;
            }
        }
        return Ok(UnitaryMatrix::new_unchecked(q));
    }
    Err(Error::Numeric {
        msg: format!("Ginibre draw numerically singular {HAAR_ATTEMPTS} times"),
        partial: 0.0,
    })
}

/// Monte Carlo estimate of `E‖g_d‖` (operator norm).
///
/// A power iteration that stops at its iteration cap contributes its last
/// Rayleigh estimate.
pub fn op_norm_estimate(d: usize, n_samples: usize, rng: &SeededRng) -> Result<McEstimate> {
    if n_samples < 2 {
        return Err(Error::domain("need at least 2 samples"));
    }
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let values: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.substream(i).rng();
            let g = gaussian_matrix(d, &mut r);
            match g.op_norm() {
                Ok(v) => v,
                Err(Error::Numeric { partial, .. }) => partial,
                Err(_) => f64::NAN,
            }
        })
        .collect();
    McEstimate::from_samples(&values, rng.seed)
}
