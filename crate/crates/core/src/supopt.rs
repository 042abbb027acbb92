//! Suprema of randomized traces, `Z(u) = sup_{g ∈ G} |tr(u π(g))|`.
//!
//! The modulus is handled through `|z| = max_θ Re(e^{iθ} z)`. For signed
//! permutations, `tr(u π(g)) = Σ_i ε_i u_{σ(i),i}`, so for a fixed phase the
//! best choice of signs turns the problem into a maximum-weight assignment
//! on `|Re(e^{iθ} u_{j,i})|`; sweeping θ over a grid and bounding the
//! θ-Lipschitz constant gives a certified interval. Diagonal groups are
//! solved exactly by sweeping the finitely many phase breakpoints.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{root_of_unity, GroupElement, GroupSpec, Permutation, SignedPermElement};
use crate::matcore::CMatrix;
use crate::randmat::{gaussian_matrix, haar_unitary, SeededRng};
use crate::stats::McEstimate;

/// Default number of Monte Carlo samples for constants.
pub const DEFAULT_SAMPLES: usize = 400;

/// Default phase-grid size, `max(64, ⌈8√d⌉·16)`.
pub fn default_angles(d: usize) -> usize {
    (((8.0 * (d as f64).sqrt()).ceil() as usize) * 16).max(64)
}

/// Optimal assignment for a maximization problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LapResult {
    /// `Σ_i cost[assignment(i), i]`, summed in increasing `i`.
    pub value: f64,
    /// Column `i` is matched to row `assignment(i)`.
    pub assignment: Permutation,
}

/// Maximum-weight perfect matching of a dense `d×d` cost matrix given
/// row-major, by shortest augmenting paths with dual potentials (O(d³)).
pub fn lap_max(d: usize, cost: &[f64]) -> Result<LapResult> {
    if cost.len() != d * d {
        return Err(Error::DimMismatch {
            expected: d * d,
            got: cost.len(),
        });
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("cost entries must be finite"));
    }
    let assignment = lap_min_columns(d, |r, c| -cost[r * d + c]);
    let value = (0..d).map(|i| cost[assignment[i] * d + i]).sum();
    Ok(LapResult {
        value,
        assignment: Permutation::new(assignment).expect("assignment is a bijection"),
    })
}

/// Minimum-cost assignment; returns the row matched to each column.
fn lap_min_columns(n: usize, a: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    // 1-based indices with a dummy column 0, as in the classic formulation
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        minv.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| p[j] - 1).collect()
}

/// A certified lower bound on `sup_g |tr(u π(g))|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupResult {
    /// `|tr(u π(witness))|`; the true supremum lies in `[value, value + rigorous_error]`.
    pub value: f64,
    pub witness: GroupElement,
    /// `θ ∈ [0, 2π)` with `Re(e^{iθ} tr(u π(witness))) = value`.
    pub phase: f64,
    pub rigorous_error: f64,
}

/// `tr(u π(g))` in O(d) for structured groups.
pub fn trace_with(u: &CMatrix, spec: &GroupSpec, g: &GroupElement) -> Result<Complex64> {
    check_dim(u, spec)?;
    spec.check_element(g)?;
    Ok(match g {
        GroupElement::SignedPerm(e) => (0..u.dim())
            .map(|i| u[(e.perm.apply(i), i)] * e.signs[i] as f64)
            .sum(),
        GroupElement::Perm(p) => (0..u.dim()).map(|i| u[(p.apply(i), i)]).sum(),
        GroupElement::Diag(a) => {
            let n = match spec {
                GroupSpec::DiagRoots { n, .. } => *n,
                _ => 2,
            };
            (0..u.dim()).map(|i| u[(i, i)] * root_of_unity(a[i], n)).sum()
        }
        GroupElement::Index(_) => u.trace_of_product(spec.element_matrix(g)?.inner()),
    })
}

fn check_dim(u: &CMatrix, spec: &GroupSpec) -> Result<()> {
    if u.dim() != spec.dim() {
        return Err(Error::DimMismatch {
            expected: spec.dim(),
            got: u.dim(),
        });
    }
    Ok(())
}

fn phase_of(z: Complex64) -> f64 {
    let t = (-z.arg()).rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

fn finish(u: &CMatrix, spec: &GroupSpec, witness: GroupElement, rigorous_error: f64) -> Result<SupResult> {
    let t = trace_with(u, spec, &witness)?;
    Ok(SupResult {
        value: t.norm(),
        witness,
        phase: phase_of(t),
        rigorous_error,
    })
}

/// Permutation problems: `max_σ Σ_i w(Re(e^{iθ} u_{σ(i),i}))` over a θ-grid.
struct PhaseSweep<'a> {
    u: &'a CMatrix,
    signed: bool,
}

impl PhaseSweep<'_> {
    fn cost(&self, theta: f64) -> Vec<f64> {
        let rot = Complex64::from_polar(1.0, theta);
        self.u
            .as_slice()
            .iter()
            .map(|z| {
                let r = (rot * z).re;
                if self.signed {
                    r.abs()
                } else {
                    r
                }
            })
            .collect()
    }

    fn solve(&self, theta: f64) -> LapResult {
        lap_max(self.u.dim(), &self.cost(theta)).expect("finite costs")
    }

    fn witness(&self, theta: f64, lap: &LapResult) -> GroupElement {
        if !self.signed {
            return GroupElement::Perm(lap.assignment.clone());
        }
        let rot = Complex64::from_polar(1.0, theta);
        let signs = (0..self.u.dim())
            .map(|i| if (rot * self.u[(lap.assignment.apply(i), i)]).re >= 0.0 { 1 } else { -1 })
            .collect();
        GroupElement::SignedPerm(SignedPermElement {
            perm: lap.assignment.clone(),
            signs,
        })
    }
}

const GOLDEN_STEPS: usize = 24;

fn sweep_permutations(u: &CMatrix, spec: &GroupSpec, angles: usize, signed: bool) -> Result<SupResult> {
    let span = if signed { PI } else { TAU };
    let step = span / angles as f64;
    let sweep = PhaseSweep { u, signed };
    let grid: Vec<f64> = (0..angles)
        .into_par_iter()
        .map(|k| sweep.solve(k as f64 * step).value)
        .collect();
    // lowest index wins ties, independent of scheduling
    let mut best_k = 0;
    for (k, &v) in grid.iter().enumerate() {
        if v > grid[best_k] {
            best_k = k;
        }
    }
    let mut best_theta = best_k as f64 * step;
    let mut best = sweep.solve(best_theta);

    let (mut lo, mut hi) = (best_theta - step, best_theta + step);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = sweep.solve(x1);
    let mut f2 = sweep.solve(x2);
    for _ in 0..GOLDEN_STEPS {
        for (x, f) in [(x1, &f1), (x2, &f2)] {
            if f.value > best.value {
                best = f.clone();
                best_theta = x;
            }
        }
        if f1.value >= f2.value {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = sweep.solve(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = sweep.solve(x2);
        }
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f.value > best.value {
            best = f;
            best_theta = x;
        }
    }

    let d = u.dim() as f64;
    let rigorous_error = PI / angles as f64 * d.sqrt() * u.frobenius_sq().sqrt();
    finish(u, spec, sweep.witness(best_theta, &best), rigorous_error)
}

/// Exact `max |Σ_i u_ii z_i|` over `z_i ∈ μ_n`: the optimal exponents for
/// direction θ only change at `n·d` breakpoints, so evaluating one θ per arc
/// between consecutive breakpoints covers every candidate.
fn sweep_diagonal(u: &CMatrix, spec: &GroupSpec, n: u32) -> Result<SupResult> {
    let d = u.dim();
    let diag: Vec<Complex64> = (0..d).map(|i| u[(i, i)]).collect();
    let nf = n as f64;
    let best_exponents = |theta: f64| -> Vec<u32> {
        diag.iter()
            .map(|a| {
                if *a == Complex64::new(0.0, 0.0) {
                    return 0;
                }
                // maximize cos(θ + arg a + 2πk/n)
                let k = (-(theta + a.arg()) * nf / TAU).round();
                k.rem_euclid(nf) as u32 % n
            })
            .collect()
    };
    let mut breaks: Vec<f64> = diag
        .iter()
        .filter(|a| a.norm() > 0.0)
        .flat_map(|a| (0..n).map(move |m| (TAU * (m as f64 + 0.5) / nf - a.arg()).rem_euclid(TAU)))
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let probes: Vec<f64> = if breaks.is_empty() {
        vec![0.0]
    } else {
        (0..breaks.len())
            .map(|k| {
                let a = breaks[k];
                let b = if k + 1 < breaks.len() { breaks[k + 1] } else { breaks[0] + TAU };
                (a + b) / 2.0
            })
            .collect()
    };
    let mut best: Option<(f64, Vec<u32>)> = None;
    for theta in probes {
        let ks = best_exponents(theta);
        let g = GroupElement::Diag(ks);
        let v = trace_with(u, spec, &g)?.norm();
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            let GroupElement::Diag(ks) = g else { unreachable!() };
            best = Some((v, ks));
        }
    }
    let (_, ks) = best.expect("at least one probe");
    finish(u, spec, GroupElement::Diag(ks), 0.0)
}

/// `sup_{g ∈ G} |tr(u π(g))|` with a certified error bound.
///
/// Signed and plain permutation groups use a phase grid of `angles` points
/// (over `[0, π)` and `[0, 2π)` respectively) with golden-section refinement
/// inside the winning cell; `rigorous_error = (π/angles)·√d·‖u‖_F`.
/// Diagonal and enumerated groups are solved exactly.
pub fn sup_abs_trace(u: &CMatrix, spec: &GroupSpec, angles: usize) -> Result<SupResult> {
    check_dim(u, spec)?;
    if angles < 4 {
        return Err(Error::domain("angles must be at least 4"));
    }
    match spec {
        GroupSpec::HyperOct { .. } => sweep_permutations(u, spec, angles, true),
        GroupSpec::SymmetricAsUnitary { .. } => sweep_permutations(u, spec, angles, false),
        GroupSpec::DiagSign { .. } => sweep_diagonal(u, spec, 2),
        GroupSpec::DiagRoots { n, .. } => sweep_diagonal(u, spec, *n),
        GroupSpec::Enumerated(g) => {
            let traces: Vec<f64> = g
                .elements()
                .par_iter()
                .map(|m| u.trace_of_product(m.inner()).norm())
                .collect();
            let mut best = 0;
            for (i, &t) in traces.iter().enumerate() {
                if t > traces[best] {
                    best = i;
                }
            }
            finish(u, spec, GroupElement::Index(best), 0.0)
        }
    }
}

/// Brute-force maximum over every element; for groups of order ≤ `limit`.
pub fn sup_abs_trace_exhaustive(u: &CMatrix, spec: &GroupSpec, limit: usize) -> Result<SupResult> {
    check_dim(u, spec)?;
    let mut best: Option<(f64, GroupElement)> = None;
    for g in spec.elements(limit)? {
        let v = trace_with(u, spec, &g)?.norm();
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, g));
        }
    }
    let (_, g) = best.expect("groups are non-empty");
    finish(u, spec, g, 0.0)
}

/// Source of the random matrix in `E Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Randomization {
    /// Complex Gaussian matrix with `E|g_ij|² = 1/d`.
    Gaussian,
    /// Haar-distributed unitary.
    Haar,
}

impl fmt::Display for Randomization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Randomization::Gaussian => "gaussian",
            Randomization::Haar => "haar",
        })
    }
}

impl FromStr for Randomization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Randomization::Gaussian),
            "haar" => Ok(Randomization::Haar),
            _ => Err(Error::Parse(format!("unknown randomization {s:?} (gaussian|haar)"))),
        }
    }
}

/// Monte Carlo estimate of `E Z` together with the mean certified error of
/// the individual suprema (each sample value is a lower bound on `Z`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EzEstimate {
    #[serde(flatten)]
    pub estimate: McEstimate,
    pub mean_rigorous_error: f64,
}

impl EzEstimate {
    /// Upper decision value `mean + k·sem + mean_rigorous_error`.
    pub fn upper(&self, k: f64) -> f64 {
        self.estimate.upper(k) + self.mean_rigorous_error
    }

    pub fn lower(&self, k: f64) -> f64 {
        self.estimate.lower(k)
    }
}

/// `E sup_g |tr(u π(g))|` for `u` Gaussian or Haar, sample `i` drawn from
/// `rng.substream(i)`.
pub fn estimate_ez(
    spec: &GroupSpec,
    randomization: Randomization,
    n_samples: usize,
    angles: usize,
    rng: &SeededRng,
) -> Result<EzEstimate> {
    if n_samples < 2 {
        return Err(Error::domain("need at least 2 samples"));
    }
    spec.validate()?;
    let d = spec.dim();
    let results: Vec<Result<SupResult>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.substream(i).rng();
            let u = match randomization {
                Randomization::Gaussian => gaussian_matrix(d, &mut r),
                Randomization::Haar => haar_unitary(d, &mut r)?.into_inner(),
            };
            sup_abs_trace(&u, spec, angles)
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = results.iter().map(|r| r.value).collect();
    let errors: Vec<f64> = results.iter().map(|r| r.rigorous_error).collect();
    Ok(EzEstimate {
        estimate: McEstimate::from_samples(&values, rng.seed)?,
        mean_rigorous_error: crate::stats::pairwise_sum(&errors) / n_samples as f64,
    })
}

/// `C₃(π) = d / E_{Haar} sup_g |tr(u π(g))|`, requiring π irreducible.
/// The standard error is propagated to first order (delta method).
pub fn c3_constant(spec: &GroupSpec, n_samples: usize, angles: usize, rng: &SeededRng) -> Result<McEstimate> {
    if !spec.is_irreducible() {
        return Err(Error::Precondition(format!(
            "{} is reducible (mean |χ|² = {})",
            spec.label(),
            spec.mean_sq_character()
        )));
    }
    c3_constant_unchecked(spec, n_samples, angles, rng)
}

/// [`c3_constant`] without the irreducibility check.
pub fn c3_constant_unchecked(spec: &GroupSpec, n_samples: usize, angles: usize, rng: &SeededRng) -> Result<McEstimate> {
    let ez = estimate_ez(spec, Randomization::Haar, n_samples, angles, rng)?.estimate;
    let d = spec.dim() as f64;
    if ez.mean <= 0.0 {
        return Err(Error::Numeric {
            msg: "non-positive mean supremum".into(),
            partial: ez.mean,
        });
    }
    Ok(McEstimate {
        mean: d / ez.mean,
        sem: d * ez.sem / (ez.mean * ez.mean),
        n: ez.n,
        seed: ez.seed,
    })
}

/// Distance from `u` to the circle-extended group image: the smallest α
/// with `tr|u − zπ(t)|² ≤ α² d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityDefect {
    /// Attained by (`witness`, `z = e^{i·phase}`).
    pub alpha: f64,
    /// Certified lower bound on the minimal α.
    pub alpha_lower: f64,
    pub witness: GroupElement,
    pub phase: f64,
}

pub fn density_defect(u: &CMatrix, spec: &GroupSpec, angles: usize) -> Result<DensityDefect> {
    let sup = sup_abs_trace(&u.adjoint(), spec, angles)?;
    let d = u.dim() as f64;
    let alpha = |s: f64| (2.0 * (1.0 - s / d)).clamp(0.0, 4.0).sqrt();
    Ok(DensityDefect {
        alpha: alpha(sup.value),
        alpha_lower: alpha(sup.value + sup.rigorous_error),
        witness: sup.witness,
        phase: sup.phase,
    })
}
