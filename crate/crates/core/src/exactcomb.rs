//! Exact combinatorics of the signed permutation group {±1}^d ⋊ S(d).
//!
//! Everything here is computed in arbitrary precision. Probabilities are
//! taken with respect to the uniform measure on the group (order `2^d d!`)
//! and are obtained by weighting the law of a sum of `j` fair signs with the
//! number `X_j` of permutations having exactly `j` fixed points. No group
//! enumeration happens outside of the tests.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact law of an integer-valued random variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactDist {
    support: Vec<i64>,
    #[serde(serialize_with = "crate::io::ser_ratio_vec")]
    probs: Vec<BigRational>,
}

impl ExactDist {
    /// Builds a distribution, checking that the support is strictly
    /// increasing and that the probabilities are non-negative and sum to 1.
    pub fn new(support: Vec<i64>, probs: Vec<BigRational>) -> Result<Self> {
        if support.len() != probs.len() || support.is_empty() {
            return Err(Error::domain("support and probabilities must be non-empty and of equal length"));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("support must be strictly increasing"));
        }
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::domain("negative probability"));
        }
        let total: BigRational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(ExactDist { support, probs })
    }

    /// Builds a distribution from integer weights over a common denominator,
    /// dropping zero-weight atoms.
    pub(crate) fn from_counts(atoms: impl IntoIterator<Item = (i64, BigInt)>, denom: &BigInt) -> Result<Self> {
        let mut atoms: Vec<(i64, BigInt)> = atoms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        atoms.sort_by_key(|(m, _)| *m);
        let (support, probs) = atoms
            .into_iter()
            .map(|(m, c)| (m, BigRational::new(c, denom.clone())))
            .unzip();
        Self::new(support, probs)
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.support.iter().copied().zip(self.probs.iter())
    }

    /// `P(X = m)`, zero off the support.
    pub fn prob(&self, m: i64) -> BigRational {
        match self.support.binary_search(&m) {
            Ok(i) => self.probs[i].clone(),
            Err(_) => BigRational::zero(),
        }
    }

    /// `P(X > k)`.
    pub fn tail(&self, k: i64) -> BigRational {
        self.iter().filter(|(m, _)| *m > k).map(|(_, p)| p.clone()).sum()
    }

    /// `E|X|^p` for a non-negative integer exponent, exactly.
    pub fn abs_moment(&self, p: u32) -> BigRational {
        self.iter()
            .map(|(m, q)| q * BigRational::from_integer(BigInt::from(m.abs()).pow(p)))
            .sum()
    }

    pub fn max_abs(&self) -> i64 {
        self.support.iter().map(|m| m.abs()).max().unwrap_or(0)
    }

    /// Atoms as `(|m|, P)` in floating point.
    pub fn abs_f64_atoms(&self) -> Vec<(f64, f64)> {
        self.iter()
            .map(|(m, p)| (m.abs() as f64, ratio_to_f64(p)))
            .collect()
    }
}

/// Nearest double to an exact rational, valid for very small and very large
/// magnitudes.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let Some(x) = r.to_f64() {
        if x.is_finite() && x != 0.0 {
            return x;
        }
    }
    let s = if r.is_negative() { -1.0 } else { 1.0 };
    s * (ln_bigint(r.numer()) - ln_bigint(r.denom())).exp()
}

/// Natural log of |n| for n ≠ 0, without overflowing for huge integers.
pub fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_ratio(r: &BigRational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Number of fixed-point-free permutations of `n` points, with `D(0) = 1`.
pub fn derangements(n: u32) -> BigInt {
    let (mut prev, mut cur) = (BigInt::one(), BigInt::zero());
    if n == 0 {
        return prev;
    }
    for m in 2..=n {
        let next = BigInt::from(m - 1) * (&prev + &cur);
        prev = cur;
        cur = next;
    }
    cur
}

/// `D(n) = n! Σ_{i≤n} (-1)^i / i!`, evaluated as the integer sum
/// `Σ (-1)^i n!/i!`.
pub fn derangements_inclusion_exclusion(n: u32) -> BigInt {
    let mut total = BigInt::zero();
    // n!/i! for i = n, n-1, ..., 0
    let mut falling = BigInt::one();
    for i in (0..=n).rev() {
        if i % 2 == 0 {
            total += &falling;
        } else {
            total -= &falling;
        }
        falling *= i.max(1);
    }
    total
}

/// `X_j`: the number of permutations of S(d) with exactly `j` fixed points.
pub fn fixed_point_count(d: u32, j: i64) -> Result<BigInt> {
    if j < 0 || j > d as i64 {
        return Err(Error::domain(format!("fixed point count j={j} outside 0..={d}")));
    }
    let j = j as u32;
    Ok(binomial(d, j) * derangements(d - j))
}

/// All `X_0, …, X_d`.
pub fn fixed_point_counts(d: u32) -> Vec<BigInt> {
    let mut der = Vec::with_capacity(d as usize + 1);
    der.push(BigInt::one());
    if d >= 1 {
        der.push(BigInt::zero());
    }
    for m in 2..=d as usize {
        let next = BigInt::from(m - 1) * (&der[m - 1] + &der[m - 2]);
        der.push(next);
    }
    let mut out = Vec::with_capacity(d as usize + 1);
    let mut binom = BigInt::one();
    for j in 0..=d {
        out.push(&binom * &der[(d - j) as usize]);
        binom = binom * (d - j) / (j + 1);
    }
    out
}

/// Number of sign patterns `(ε_1..ε_j)` whose sum exceeds `k`.
fn sign_patterns_above(j: u32, k: i64) -> BigInt {
    // S_j = 2p - j where p is the number of +1 signs
    let mut binom = BigInt::one();
    let mut total = BigInt::zero();
    for p in 0..=j {
        if 2 * p as i64 - j as i64 > k {
            total += &binom;
        }
        binom = binom * (j - p) / (p + 1);
    }
    total
}

/// `P(S_j > k)` for `S_j` a sum of `j` independent fair signs.
pub fn sign_sum_tail(j: u32, k: i64) -> BigRational {
    BigRational::new(sign_patterns_above(j, k), BigInt::one() << j)
}

fn require_dim(d: u32) -> Result<()> {
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    Ok(())
}

/// Haar probability that `tr(u) > k` on the signed permutation group.
pub fn char_tail_hyperoct(d: u32, k: i64) -> Result<BigRational> {
    require_dim(d)?;
    if k >= d as i64 {
        return Ok(BigRational::zero());
    }
    let counts = fixed_point_counts(d);
    let mut num = BigInt::zero();
    for (j, x) in counts.iter().enumerate() {
        let j = j as u32;
        if (j as i64) <= k || x.is_zero() {
            continue;
        }
        num += (x * sign_patterns_above(j, k)) << (d - j);
    }
    Ok(BigRational::new(num, factorial(d) << d))
}

/// Exact law of the character `tr(u)` on the signed permutation group.
pub fn char_dist_hyperoct(d: u32) -> Result<ExactDist> {
    require_dim(d)?;
    let counts = fixed_point_counts(d);
    let di = d as i64;
    let mut weights = vec![BigInt::zero(); 2 * d as usize + 1];
    for (j, x) in counts.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let j = j as u32;
        let mut binom = BigInt::one();
        for p in 0..=j {
            let m = 2 * p as i64 - j as i64;
            weights[(m + di) as usize] += (x * &binom) << (d - j);
            binom = binom * (j - p) / (p + 1);
        }
    }
    ExactDist::from_counts(
        weights.into_iter().enumerate().map(|(i, w)| (i as i64 - di, w)),
        &(factorial(d) << d),
    )
}

/// Law of the number of fixed points of a uniform permutation in S(d), i.e.
/// the character of the permutation representation.
pub fn fixed_point_dist(d: u32) -> Result<ExactDist> {
    require_dim(d)?;
    let counts = fixed_point_counts(d);
    ExactDist::from_counts(
        counts.into_iter().enumerate().map(|(j, x)| (j as i64, x)),
        &factorial(d),
    )
}

/// `P(#Fix(σ) > k)` for σ uniform in S(d).
pub fn fixed_point_tail(d: u32, k: i64) -> Result<BigRational> {
    require_dim(d)?;
    let num: BigInt = fixed_point_counts(d)
        .into_iter()
        .enumerate()
        .filter(|(j, _)| *j as i64 > k)
        .map(|(_, x)| x)
        .sum();
    Ok(BigRational::new(num, factorial(d)))
}

/// Law of `ε_1 + … + ε_d` for independent fair signs.
pub fn rademacher_sum_dist(d: u32) -> Result<ExactDist> {
    require_dim(d)?;
    ExactDist::from_counts(
        (0..=d).map(|p| (2 * p as i64 - d as i64, binomial(d, p))),
        &(BigInt::one() << d),
    )
}

fn check_eps(eps: &BigRational) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::domain(format!("radius {eps} must be positive")));
    }
    Ok(())
}

/// Largest integer `k` with `{tr > d(1 - eps²/2)} = {tr > k}` for integer traces.
fn open_ball_trace_floor(d: u32, eps: &BigRational) -> i64 {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let t = BigRational::from_integer(BigInt::from(d)) * (BigRational::one() - eps * eps * half);
    t.floor().to_integer().to_i64().unwrap_or(i64::MIN)
}

/// Haar measure of the open δ₂-ball of radius `eps` around the identity in
/// the signed permutation group. The ball is `{tr(u) > d(1 - eps²/2)}`
/// with the strict inequality applied literally.
pub fn ball_measure_hyperoct(d: u32, eps: &BigRational) -> Result<BigRational> {
    require_dim(d)?;
    check_eps(eps)?;
    char_tail_hyperoct(d, open_ball_trace_floor(d, eps))
}

/// Same ball for the permutation matrices `{u_σ}`; `δ₂(u_σ, 1)² = 2(d - #Fix)/d`.
pub fn ball_measure_symmetric(d: u32, eps: &BigRational) -> Result<BigRational> {
    require_dim(d)?;
    check_eps(eps)?;
    fixed_point_tail(d, open_ball_trace_floor(d, eps))
}

/// Same ball for diagonal sign matrices; a sign vector with `r` flips is at
/// δ₂-distance `2√(r/d)` from the identity.
pub fn ball_measure_diag_sign(d: u32, eps: &BigRational) -> Result<BigRational> {
    require_dim(d)?;
    check_eps(eps)?;
    // 2√(r/d) < eps  ⇔  4r < d eps²
    let bound = BigRational::from_integer(BigInt::from(d)) * eps * eps;
    let num: BigInt = (0..=d)
        .filter(|r| BigRational::from_integer(BigInt::from(4 * r)) < bound)
        .map(|r| binomial(d, r))
        .sum();
    Ok(BigRational::new(num, BigInt::one() << d))
}

/// Ball measure for a floating-point radius.
#[derive(Debug, Clone, PartialEq)]
pub struct BallMeasureBound {
    pub value: BigRational,
    /// Always true: the threshold is rounded down, so `value` can only
    /// overestimate the exact measure.
    pub upper_bound: bool,
}

/// Convenience wrapper over [`ball_measure_hyperoct`] for an `f64` radius.
/// The trace threshold is rounded downward, so the result is labelled an
/// upper bound on the exact measure.
pub fn ball_measure_hyperoct_f64(d: u32, eps: f64) -> Result<BallMeasureBound> {
    require_dim(d)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain(format!("radius {eps} must be positive and finite")));
    }
    let t = d as f64 * (1.0 - eps * eps / 2.0);
    let k = (t - 1e-9 * (d as f64).max(1.0)).floor();
    let k = if k < -(d as f64) - 1.0 { -(d as i64) - 1 } else { k as i64 };
    Ok(BallMeasureBound {
        value: char_tail_hyperoct(d, k)?,
        upper_bound: true,
    })
}

/// `⌈x⌉` as an integer for a positive rational.
pub(crate) fn ceil_ratio(x: &BigRational) -> BigInt {
    let (q, r) = x.numer().div_rem(x.denom());
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}
