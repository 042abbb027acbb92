//! Dense complex matrices and the distances used on U(d).

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `max |(u*u - I)_{ij}|` accepted by [`UnitaryMatrix::new`].
pub const UNITARY_TOL: f64 = 1e-9;

/// Relative tolerance on successive Rayleigh quotients in the operator norm.
const POWER_ITER_RTOL: f64 = 1e-10;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMatrix { dim, data }
    }

    /// Builds from row-major entries; rejects non-square or non-finite input.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(CMatrix { dim, data })
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, z) in entries.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self · other)` in O(d²) without forming the product.
    pub fn trace_of_product(&self, other: &CMatrix) -> Complex64 {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self[(i, j)] * other[(j, i)];
            }
        }
        acc
    }

    /// `Σ |a_ij|²`.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mat_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self* · x`.
    pub fn adjoint_mat_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        for (i, xi) in x.iter().enumerate() {
            for (yj, a) in y.iter_mut().zip(self.row(i)) {
                *yj += a.conj() * xi;
            }
        }
        y
    }

    fn check_same_dim(&self, other: &CMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    /// Largest singular value, by power iteration on `a*a`.
    ///
    /// The iteration runs on `(a*a)^8`, so each step contracts the
    /// unwanted directions eight times faster than plain power iteration;
    /// the convergence test uses the Rayleigh quotient of `a*a` itself. Two
    /// deterministic start vectors are used (all-ones, then an irregular
    /// one) and the larger estimate is kept, so a start vector orthogonal to
    /// the top singular vector cannot produce a low answer.
    pub fn op_norm(&self) -> Result<f64> {
        let d = self.dim;
        if d == 0 {
            return Ok(0.0);
        }
        let gram = &self.adjoint() * self;
        let scale = gram.trace().re;
        if scale == 0.0 {
            return Ok(0.0);
        }
        let mut power = gram.scale(Complex64::new(1.0 / scale, 0.0));
        for _ in 0..3 {
            power = &power * &power;
            let t = power.trace().re;
            if t > 0.0 {
                power = power.scale(Complex64::new(1.0 / t, 0.0));
            }
        }
        let ones = vec![Complex64::new(1.0, 0.0); d];
        let irregular: Vec<Complex64> = (0..d)
            .map(|i| {
                let t = (i as f64 + 1.0) * 0.618_033_988_749_895;
                Complex64::new(1.0 + (t * 7.0).sin(), (t * 3.0).cos())
            })
            .collect();
        let a = self.power_iteration(&power, ones);
        let b = self.power_iteration(&power, irregular);
        match (a, b) {
            (Ok(x), Ok(y)) => Ok(x.max(y)),
            (Err(e), Ok(y)) | (Ok(y), Err(e)) => match e {
                Error::Numeric { partial, .. } if partial > y => Err(e),
                _ => Ok(y),
            },
            (Err(e), Err(_)) => Err(e),
        }
    }

    fn power_iteration(&self, step: &CMatrix, mut x: Vec<Complex64>) -> Result<f64> {
        let cap = 10 * self.dim + 100;
        normalize(&mut x);
        let mut prev = f64::NAN;
        for _ in 0..cap {
            // Rayleigh quotient x*(a*a)x = |ax|²
            let lambda: f64 = self.mat_vec(&x).iter().map(|z| z.norm_sqr()).sum();
            if lambda == 0.0 {
                return Ok(0.0);
            }
            if (lambda - prev).abs() <= POWER_ITER_RTOL * lambda {
                return Ok(lambda.sqrt());
            }
            prev = lambda;
            x = step.mat_vec(&x);
            if normalize(&mut x) == 0.0 {
                return Ok(0.0);
            }
        }
        Err(Error::Numeric {
            msg: format!("power iteration did not converge in {cap} steps"),
            partial: prev.sqrt(),
        })
    }
}

fn normalize(x: &mut [Complex64]) -> f64 {
    let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in x.iter_mut() {
            *z /= n;
        }
    }
    n
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let d = self.dim;
        let mut out = CMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * d..(k + 1) * d];
                let dst = &mut out.data[i * d..(i + 1) * d];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

/// A matrix certified unitary to [`UNITARY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tol(m, UNITARY_TOL)
    }

    pub fn with_tol(m: CMatrix, tol: f64) -> Result<Self> {
        let defect = unitarity_defect(&m);
        if !(defect <= tol) {
            return Err(Error::domain(format!(
                "matrix is not unitary: max |u*u - I| = {defect:e} exceeds {tol:e}"
            )));
        }
        Ok(UnitaryMatrix(m))
    }

    pub fn identity(dim: usize) -> Self {
        UnitaryMatrix(CMatrix::identity(dim))
    }

    /// Wraps without checking; callers guarantee unitarity by construction.
    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        UnitaryMatrix(m)
    }

    pub fn inner(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn adjoint(&self) -> Self {
        UnitaryMatrix(self.0.adjoint())
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> Self {
        UnitaryMatrix(&self.0 * &other.0)
    }
}

/// `max_{ij} |(m*m - I)_{ij}|`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let p = &m.adjoint() * m;
    let d = m.dim;
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.trace()
}

/// Normalized Hilbert–Schmidt distance `(d⁻¹ tr|u - v|²)^{1/2}`.
pub fn delta2(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    u.check_same_dim(v)?;
    let s: f64 = u.data.iter().zip(&v.data).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok((s / u.dim as f64).sqrt())
}

/// Operator-norm distance `‖u - v‖`.
pub fn delta_inf(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    u.check_same_dim(v)?;
    (u - v).op_norm()
}

/// `(d^{-1/2} tr|a|²)^{1/2}`.
pub fn scaled_frobenius(a: &CMatrix) -> f64 {
    (a.frobenius_sq() / (a.dim as f64).sqrt()).sqrt()
}

/// Householder QR of a square matrix: returns `(Q, R)` with `Q` unitary and
/// `R` upper triangular, `a = QR`.
pub fn householder_qr(a: &CMatrix) -> (CMatrix, CMatrix) {
    let d = a.dim;
    let mut r = a.clone();
    let mut q = CMatrix::identity(d);
    for k in 0..d {
        let norm_x: f64 = (k..d).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        // v = x + phase |x| e_k, reflect so r_kk = -phase |x|
        let mut v: Vec<Complex64> = (k..d).map(|i| r[(i, k)]).collect();
        v[0] += phase * norm_x;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        // R <- (I - 2 v v*/|v|²) R on rows k..d
        for j in 0..d {
            let s: Complex64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * r[(k + t, j)]).sum();
            let f = s * (2.0 / vnorm_sq);
            for (t, vt) in v.iter().enumerate() {
                r[(k + t, j)] -= vt * f;
            }
        }
        // Q <- Q (I - 2 v v*/|v|²) on columns k..d
        for i in 0..d {
            let s: Complex64 = v.iter().enumerate().map(|(t, vt)| q[(i, k + t)] * vt).sum();
            let f = s * (2.0 / vnorm_sq);
            for (t, vt) in v.iter().enumerate() {
                q[(i, k + t)] -= f * vt.conj();
            }
        }
        for i in k + 1..d {
            r[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (q, r)
}
