//! Subgaussian (ψ₂) Orlicz norms.
//!
//! `‖F‖_{ψ₂} = inf{c > 0 : E ψ₂(|F|/c) ≤ ψ₂(1)}` with `ψ₂(x) = e^{x²} − 1`.
//! The map `c ↦ E ψ₂(|F|/c)` is continuous and strictly decreasing, so the
//! norm is found by bisection on a bracket that straddles `e − 1`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactcomb::{self, ExactDist};
use crate::groups::GroupSpec;
use crate::stats::pairwise_sum;

/// Groups of order up to this size have their characters tabulated.
pub const TABULATION_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Psi2Result {
    /// Upper end of the final bracket: `E ψ₂(|F|/norm) ≤ e − 1`.
    pub norm: f64,
    /// `(lo, hi)` with `E ψ₂(|F|/lo) ≥ e − 1 ≥ E ψ₂(|F|/hi)`.
    pub bracket: (f64, f64),
    pub iterations: u32,
}

fn target() -> f64 {
    std::f64::consts::E - 1.0
}

/// `E ψ₂(|F|/c)` over weighted atoms `(|x|, p)`.
pub fn orlicz_integral(atoms: &[(f64, f64)], c: f64) -> f64 {
    let terms: Vec<f64> = atoms
        .iter()
        .map(|&(x, p)| if x == 0.0 || p == 0.0 { 0.0 } else { p * (x / c).powi(2).exp_m1() })
        .collect();
    pairwise_sum(&terms)
}

/// ψ₂ norm of a finitely supported law given as `(value, weight)` atoms;
/// values are taken in absolute value and weights must sum to one.
pub fn psi2_atoms(atoms: &[(f64, f64)]) -> Result<Psi2Result> {
    if atoms.is_empty() {
        return Err(Error::domain("no atoms"));
    }
    if atoms.iter().any(|&(x, p)| !x.is_finite() || !p.is_finite() || p < 0.0) {
        return Err(Error::domain("atoms must be finite with non-negative weights"));
    }
    let atoms: Vec<(f64, f64)> = atoms.iter().map(|&(x, p)| (x.abs(), p)).collect();
    let top = atoms.iter().filter(|a| a.1 > 0.0).map(|a| a.0).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(Psi2Result {
            norm: 0.0,
            bracket: (0.0, 0.0),
            iterations: 0,
        });
    }
    let t = target();
    let f = |c: f64| orlicz_integral(&atoms, c);
    // with total mass ≤ 1 the integral at c = max|F| is at most e − 1; the
    // loop only matters when rounding pushes the mass slightly above 1
    let mut hi = top;
    let mut iterations = 0;
    while f(hi) > t {
        hi *= 2.0;
        iterations += 1;
    }
    let mut lo = hi / 2.0;
    while f(lo) < t {
        hi = lo;
        lo /= 2.0;
        iterations += 1;
    }
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > t {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(Psi2Result {
        norm: hi,
        bracket: (lo, hi),
        iterations,
    })
}

/// ψ₂ norm of an exact integer-valued law.
pub fn psi2_exact(dist: &ExactDist) -> Result<Psi2Result> {
    psi2_atoms(&dist.abs_f64_atoms())
}

/// ψ₂ norm of the empirical measure of `samples`.
pub fn psi2_empirical(samples: &[f64]) -> Result<Psi2Result> {
    if samples.is_empty() {
        return Err(Error::domain("no samples"));
    }
    let w = 1.0 / samples.len() as f64;
    let atoms: Vec<(f64, f64)> = samples.iter().map(|&x| (x, w)).collect();
    psi2_atoms(&atoms)
}

/// `max_{1 ≤ n ≤ n_max} ‖F‖_{2n} / √(2n)`, with the moments computed
/// exactly and only the final root taken in floating point.
pub fn moment_ratio(dist: &ExactDist, n_max: u32) -> Result<f64> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let mut best = 0.0f64;
    for n in 1..=n_max {
        let m: BigRational = dist.abs_moment(2 * n);
        if m.is_zero() {
            continue;
        }
        let two_n = 2.0 * n as f64;
        let v = (exactcomb::ln_ratio(&m) / two_n).exp() / two_n.sqrt();
        best = best.max(v);
    }
    Ok(best)
}

/// Exact law of the character, when the family has a closed form.
pub fn character_dist(spec: &GroupSpec) -> Result<Option<ExactDist>> {
    let d = spec.dim() as u32;
    Ok(match spec {
        GroupSpec::HyperOct { .. } => Some(exactcomb::char_dist_hyperoct(d)?),
        GroupSpec::SymmetricAsUnitary { .. } => Some(exactcomb::fixed_point_dist(d)?),
        GroupSpec::DiagSign { .. } => Some(exactcomb::rademacher_sum_dist(d)?),
        _ => None,
    })
}

/// `C₂(π) = ‖χ_π‖_{ψ₂}` under the uniform measure on the group, with
/// complex characters taken in modulus.
pub fn c2_constant(spec: &GroupSpec) -> Result<Psi2Result> {
    spec.validate()?;
    if let Some(dist) = character_dist(spec)? {
        return psi2_exact(&dist);
    }
    let n = spec
        .order_usize()
        .filter(|&n| n <= TABULATION_LIMIT)
        .ok_or_else(|| {
            Error::Unsupported(format!(
                "{} has no closed-form character law and is too large to tabulate; use a sampled estimate",
                spec.label()
            ))
        })?;
    let w = 1.0 / n as f64;
    let atoms = spec
        .elements(n)?
        .iter()
        .map(|g| Ok((spec.character(g)?.norm(), w)))
        .collect::<Result<Vec<_>>>()?;
    psi2_atoms(&atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcomb::char_dist_hyperoct;
    use crate::groups::{enumerate_closure, quaternion_generators};
    use crate::matcore::UnitaryMatrix;
    use num_bigint::BigInt;

    fn check_certificate(atoms: &[(f64, f64)], r: &Psi2Result) {
        let (lo, hi) = r.bracket;
        assert!(lo <= r.norm && r.norm <= hi);
        assert!(hi - lo <= 1e-9 * r.norm.max(1.0));
        assert!(orlicz_integral(atoms, lo) >= target());
        assert!(orlicz_integral(atoms, hi) <= target());
    }

    #[test]
    fn closed_forms() {
        let r = psi2_atoms(&[(3.5, 1.0)]).unwrap();
        assert!((r.norm - 3.5).abs() < 1e-9);
        let rad = [(-1.0, 0.5), (1.0, 0.5)];
        let r = psi2_atoms(&rad).unwrap();
        assert!((r.norm - 1.0).abs() < 1e-9);
        let zero_two = [(0.0, 0.5), (2.0, 0.5)];
        let r = psi2_atoms(&zero_two).unwrap();
        let want = 2.0 / (2.0 * std::f64::consts::E - 1.0).ln().sqrt();
        assert!((r.norm - want).abs() < 1e-9, "{} vs {want}", r.norm);
        assert!((want - 1.6385).abs() < 1e-4);
        check_certificate(&zero_two, &r);
        let z = psi2_atoms(&[(0.0, 1.0)]).unwrap();
        assert_eq!(z.norm, 0.0);
    }

    #[test]
    fn empirical_basics() {
        let r = psi2_empirical(&[2.0; 10]).unwrap();
        assert!((r.norm - 2.0).abs() < 1e-9);
        let xs: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let a = psi2_empirical(&xs).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| 3.0 * x).collect();
        let b = psi2_empirical(&scaled).unwrap();
        assert!((b.norm - 3.0 * a.norm).abs() < 1e-9 * b.norm);
        assert!(psi2_empirical(&[]).is_err());
    }

    #[test]
    fn exact_character_laws() {
        for d in [2u32, 5, 9] {
            let dist = char_dist_hyperoct(d).unwrap();
            let r = psi2_exact(&dist).unwrap();
            check_certificate(&dist.abs_f64_atoms(), &r);
            let m = moment_ratio(&dist, 32).unwrap();
            assert!(m / r.norm >= 0.25 && m / r.norm <= 4.0);
        }
    }

    #[test]
    fn moment_ratio_point_mass() {
        let one = ExactDist::new(vec![1], vec![BigRational::from_integer(BigInt::from(1))]).unwrap();
        assert!((moment_ratio(&one, 10).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(moment_ratio(&one, 0).is_err());
    }

    #[test]
    fn c2_for_families() {
        let trivial = enumerate_closure(&[UnitaryMatrix::identity(3)], 1e-9, 10).unwrap();
        let r = c2_constant(&GroupSpec::enumerated(trivial)).unwrap();
        assert!((r.norm - 3.0).abs() < 1e-9);
        let q8 = enumerate_closure(&quaternion_generators(), 1e-9, 100).unwrap();
        let r = c2_constant(&GroupSpec::enumerated(q8)).unwrap();
        assert!(r.norm > 0.0);
        // |χ| ≡ 1 for a one-dimensional group
        let r = c2_constant(&GroupSpec::DiagRoots { d: 1, n: 5 }).unwrap();
        assert!((r.norm - 1.0).abs() < 1e-9);
        assert!(matches!(
            c2_constant(&GroupSpec::DiagRoots { d: 40, n: 3 }),
            Err(Error::Unsupported(_))
        ));
        // closed form and tabulation agree
        let a = c2_constant(&GroupSpec::HyperOct { d: 3 }).unwrap();
        let g = GroupSpec::enumerated(GroupSpec::HyperOct { d: 3 }.to_enumerated(1e-9, 100).unwrap());
        let b = c2_constant(&g).unwrap();
        assert!((a.norm - b.norm).abs() < 1e-9);
    }
}
