//! Metric entropy of group images.
//!
//! Covering numbers here are `N'(ε)`: coverings of the group by open
//! ε-balls centred at group elements. Each grid point carries a certified
//! bracket `[n_lower, n_upper]`, together with the source of each side.
//!
//! Lower bounds come from the ball measure (`N' ≥ 1/m(B_ε)`) and from
//! 2ε-separated sets; upper bounds from a greedy cover, from the measure of
//! the half ball (`N' ≤ 1/m(B_{ε/2})`), from an abelian subgroup of index
//! `k` (`N' ≤ k(4π/ε)^d`), and from the group order.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactcomb::{self, factorial, ln_bigint};
use crate::groups::{abelian_index_upper, GroupElement, GroupSpec, DEFAULT_EXHAUSTIVE_CAP};
use crate::matcore::{delta_inf, CMatrix};
use crate::randmat::SeededRng;

/// Default limit on the group order for element-level computations.
pub const DEFAULT_BUDGET: usize = 10_000;

/// Metric on the group image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// `(d⁻¹ tr|u − v|²)^{1/2}`.
    Delta2,
    /// Operator norm `‖u − v‖`.
    DeltaInf,
    /// `(d^{-1/2} tr|u − v|²)^{1/2}`.
    ScaledFrobenius,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Delta2 => "delta2",
            MetricKind::DeltaInf => "delta-inf",
            MetricKind::ScaledFrobenius => "scaled-frobenius",
        })
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta2" => Ok(MetricKind::Delta2),
            "delta-inf" => Ok(MetricKind::DeltaInf),
            "scaled-frobenius" => Ok(MetricKind::ScaledFrobenius),
            _ => Err(Error::Parse(format!("unknown metric {s:?}"))),
        }
    }
}

/// Distance between two group elements. `Delta2` is computed from the
/// character, `(2(1 − d⁻¹ Re χ(s⁻¹t)))^{1/2}`, in O(d) for structured groups.
pub fn group_metric(spec: &GroupSpec, s: &GroupElement, t: &GroupElement, kind: MetricKind) -> Result<f64> {
    spec.check_element(s)?;
    spec.check_element(t)?;
    let d = spec.dim() as f64;
    let delta2 = || -> Result<f64> { Ok((2.0 * (1.0 - spec.re_inner(s, t)? / d)).max(0.0).sqrt()) };
    match kind {
        MetricKind::Delta2 => delta2(),
        MetricKind::ScaledFrobenius => Ok(d.powf(0.25) * delta2()?),
        MetricKind::DeltaInf => delta_inf(spec.element_matrix(s)?.inner(), spec.element_matrix(t)?.inner()),
    }
}

/// The set `{x > threshold}` describing an open ball in terms of a
/// closeness value `x`. For δ₂ the closeness is `Re χ(s⁻¹t)` and integral
/// values are compared exactly against a rational threshold.
#[derive(Debug, Clone)]
struct Threshold {
    exact_floor: Option<i64>,
    value: f64,
}

impl Threshold {
    fn new(kind: MetricKind, d: usize, eps: f64) -> Self {
        let df = d as f64;
        match kind {
            MetricKind::Delta2 => {
                let e = BigRational::from_float(eps).expect("finite radius");
                let t = BigRational::from_integer(BigInt::from(d))
                    * (BigRational::one() - &e * &e / BigRational::from_integer(BigInt::from(2)));
                Threshold {
                    exact_floor: t.floor().to_integer().to_i64(),
                    value: exactcomb::ratio_to_f64(&t),
                }
            }
            MetricKind::ScaledFrobenius => Threshold {
                exact_floor: None,
                value: df * (1.0 - eps * eps / (2.0 * df.sqrt())),
            },
            MetricKind::DeltaInf => Threshold {
                exact_floor: None,
                value: -eps,
            },
        }
    }

    fn contains(&self, x: f64) -> bool {
        if let Some(k) = self.exact_floor {
            let r = x.round();
            if (x - r).abs() < 1e-9 {
                return r as i64 > k;
            }
        }
        x > self.value
    }
}

/// Closeness between listed elements: `Re χ(s⁻¹t)` for δ₂ and the scaled
/// Frobenius metric, `−δ∞(s, t)` for the operator norm.
struct Closeness<'a> {
    spec: &'a GroupSpec,
    kind: MetricKind,
    cache: HashMap<GroupElement, f64>,
}

impl<'a> Closeness<'a> {
    fn new(spec: &'a GroupSpec, kind: MetricKind) -> Self {
        Closeness {
            spec,
            kind,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, s: &GroupElement, t: &GroupElement) -> Result<f64> {
        match self.kind {
            MetricKind::Delta2 | MetricKind::ScaledFrobenius => self.spec.re_inner(s, t),
            MetricKind::DeltaInf => {
                // bi-invariance: δ∞(s, t) = ‖1 − π(s⁻¹t)‖
                let x = self.spec.compose(&self.spec.inverse(s)?, t)?;
                if let Some(v) = self.cache.get(&x) {
                    return Ok(*v);
                }
                let m = self.spec.element_matrix(&x)?;
                let v = -delta_inf(&CMatrix::identity(self.spec.dim()), m.inner())?;
                self.cache.insert(x, v);
                Ok(v)
            }
        }
    }
}

/// Source of one side of a covering bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// `1/m(B_ε)` (lower) or `1/m(B_{ε/2})` (upper) from the exact ball measure.
    ExactMeasure,
    GreedyCover,
    /// Size of a 2ε-separated set.
    Packing,
    /// `k(4π/ε)^d` for an abelian subgroup of index `k`.
    AbelianCover,
    GroupOrder,
    /// ε exceeds the diameter, or the trivial bound `N' ≥ 1`.
    Trivial,
}

impl BoundSource {
    pub fn tag(&self) -> &'static str {
        match self {
            BoundSource::ExactMeasure => "exact-measure",
            BoundSource::GreedyCover => "greedy-cover",
            BoundSource::Packing => "packing",
            BoundSource::AbelianCover => "abelian-cover",
            BoundSource::GroupOrder => "group-order",
            BoundSource::Trivial => "trivial",
        }
    }
}

fn ser_biguint_vec<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Two-sided brackets on covering numbers over a grid of radii.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringCurve {
    pub metric: MetricKind,
    pub eps: Vec<f64>,
    #[serde(serialize_with = "ser_biguint_vec")]
    pub n_lower: Vec<BigUint>,
    #[serde(serialize_with = "ser_biguint_vec")]
    pub n_upper: Vec<BigUint>,
    pub lower_source: Vec<BoundSource>,
    pub upper_source: Vec<BoundSource>,
    /// `ln |G|`, which bounds `ln N'` at every scale.
    pub log_order: f64,
    /// Greedy cover sizes where the group was small enough to enumerate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub greedy: Option<Vec<u64>>,
}

/// Grid of `points` radii spaced geometrically from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) || points == 0 {
        return Err(Error::domain("grid needs 0 < lo <= hi and at least one point"));
    }
    if points == 1 {
        return Ok(vec![hi]);
    }
    let (a, b) = (lo.log2(), hi.log2());
    let mut grid: Vec<f64> = (0..points)
        .map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp2())
        .collect();
    grid[0] = lo;
    grid[points - 1] = hi;
    grid.dedup();
    Ok(grid)
}

/// The default grid: 64 geometric points from 2⁻⁶ to 2.
pub fn default_eps_grid() -> Vec<f64> {
    geometric_grid(1.0 / 64.0, 2.0, 64).expect("valid grid")
}

fn ceil_inverse(m: &BigRational) -> BigUint {
    exactcomb::ceil_ratio(&m.recip()).to_biguint().expect("positive")
}

fn floor_inverse(m: &BigRational) -> BigUint {
    m.recip().floor().to_integer().to_biguint().expect("positive")
}

/// `(1/m(B_ε), 1/m(B_{ε/2}))` rounded outward, for structured groups under δ₂.
fn structured_measure(spec: &GroupSpec, kind: MetricKind, eps: f64) -> Result<Option<(BigUint, BigUint)>> {
    if kind != MetricKind::Delta2 {
        return Ok(None);
    }
    let d = spec.dim() as u32;
    let ball = |e: &BigRational| -> Result<Option<BigRational>> {
        Ok(match spec {
            GroupSpec::HyperOct { .. } => Some(exactcomb::ball_measure_hyperoct(d, e)?),
            GroupSpec::SymmetricAsUnitary { .. } => Some(exactcomb::ball_measure_symmetric(d, e)?),
            GroupSpec::DiagSign { .. } => Some(exactcomb::ball_measure_diag_sign(d, e)?),
            _ => None,
        })
    };
    let e = BigRational::from_float(eps).expect("finite radius");
    let half = &e / BigRational::from_integer(BigInt::from(2));
    match (ball(&e)?, ball(&half)?) {
        (Some(full), Some(half)) => Ok(Some((ceil_inverse(&full), floor_inverse(&half)))),
        _ => Ok(None),
    }
}

/// Index of a known abelian subgroup, used for the `k(4π/ε)^d` bound.
fn known_abelian_index(spec: &GroupSpec, budget: usize) -> Result<Option<BigUint>> {
    Ok(match spec {
        // the diagonal sign matrices form an abelian subgroup of index d!
        GroupSpec::HyperOct { d } => factorial(*d as u32).to_biguint(),
        GroupSpec::DiagSign { .. } | GroupSpec::DiagRoots { .. } => Some(BigUint::one()),
        GroupSpec::SymmetricAsUnitary { .. } => None,
        GroupSpec::Enumerated(g) if g.order() <= budget => {
            abelian_index_upper(g, DEFAULT_EXHAUSTIVE_CAP)?.index.to_biguint()
        }
        GroupSpec::Enumerated(_) => None,
    })
}

/// `⌊k (c/ε)^d⌋` rounded up slightly so the result stays a valid upper bound,
/// or `None` when it exceeds `limit`.
fn abelian_cover_bound(k: &BigUint, d: usize, c: f64, eps: f64, limit: &BigUint) -> Option<BigUint> {
    let log = ln_bigint(&BigInt::from(k.clone())) + d as f64 * (c / eps).ln();
    if log >= ln_bigint(&BigInt::from(limit.clone())) {
        return None;
    }
    let v = (log.exp() * (1.0 + 1e-9)).ceil();
    BigUint::from_f64(v)
}

/// Farthest-point-first ordering of a finite element list: `closest[k]` is
/// the smallest closeness of any element to its nearest among the first
/// `k + 1` centres.
struct FarthestFirst {
    closest: Vec<f64>,
}

impl FarthestFirst {
    fn run(elements: &[GroupElement], closeness: &mut Closeness<'_>, stop: &Threshold) -> Result<Self> {
        let n = elements.len();
        let mut best: Vec<f64> = Vec::with_capacity(n);
        for g in elements {
            best.push(closeness.get(&elements[0], g)?);
        }
        let mut is_center = vec![false; n];
        is_center[0] = true;
        let mut closest = Vec::new();
        loop {
            // lowest index wins ties
            let mut far = 0;
            for i in 1..n {
                if best[i] < best[far] {
                    far = i;
                }
            }
            closest.push(best[far]);
            if stop.contains(best[far]) || is_center[far] {
                break;
            }
            is_center[far] = true;
            for i in 0..n {
                let c = closeness.get(&elements[far], &elements[i])?;
                if c > best[i] {
                    best[i] = c;
                }
            }
        }
        Ok(FarthestFirst { closest })
    }

    /// Number of centres needed before every element is inside the ball.
    fn size_at(&self, t: &Threshold) -> Option<u64> {
        self.closest.iter().position(|&c| t.contains(c)).map(|k| k as u64 + 1)
    }
}

/// Certified brackets on `N'(ε)` over `eps_grid`.
///
/// Groups of order at most `budget` are enumerated: their ball measures are
/// counted and a farthest-point greedy cover and packing are computed.
/// Larger groups get measure bounds where an exact formula exists, plus the
/// abelian-subgroup and group-order bounds.
pub fn covering_curve(spec: &GroupSpec, eps_grid: &[f64], kind: MetricKind, budget: usize) -> Result<CoveringCurve> {
    spec.validate()?;
    if eps_grid.is_empty() {
        return Err(Error::domain("empty radius grid"));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::domain("radii must be positive and finite"));
    }
    if eps_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("radius grid must be strictly increasing"));
    }
    let d = spec.dim();
    let order = spec.order().to_biguint().expect("positive order");
    let log_order = ln_bigint(&spec.order());
    let abelian = known_abelian_index(spec, budget)?;
    // δ₂ and δ∞ distances never exceed 2
    let diameter = match kind {
        MetricKind::ScaledFrobenius => 2.0 * (d as f64).powf(0.25),
        _ => 2.0,
    };

    let small = spec.order_usize().filter(|&n| n <= budget);
    let elements = match small {
        Some(n) => spec.elements(n)?,
        None => Vec::new(),
    };
    let mut closeness = Closeness::new(spec, kind);
    let ff = if elements.is_empty() {
        None
    } else {
        Some(FarthestFirst::run(&elements, &mut closeness, &Threshold::new(kind, d, eps_grid[0]))?)
    };
    // closeness of every element to the identity, for counting ball measures
    let to_identity: Option<Vec<f64>> = match spec {
        GroupSpec::Enumerated(g) if small.is_none() => {
            let id = spec.identity();
            Some(
                (0..g.order())
                    .map(|i| closeness.get(&id, &GroupElement::Index(i)))
                    .collect::<Result<_>>()?,
            )
        }
        _ if !elements.is_empty() => {
            let id = spec.identity();
            Some(elements.iter().map(|g| closeness.get(&id, g)).collect::<Result<_>>()?)
        }
        _ => None,
    };
    let counted_measure = |eps: f64| -> Option<(BigUint, BigUint)> {
        let xs = to_identity.as_ref()?;
        let count = |t: &Threshold| xs.iter().filter(|&&x| t.contains(x)).count();
        let n = BigRational::from_integer(BigInt::from(xs.len()));
        let full = count(&Threshold::new(kind, d, eps));
        let half = count(&Threshold::new(kind, d, eps / 2.0));
        let m = |c: usize| BigRational::from_integer(BigInt::from(c)) / &n;
        Some((ceil_inverse(&m(full)), floor_inverse(&m(half))))
    };

    let mut n_lower = Vec::with_capacity(eps_grid.len());
    let mut n_upper = Vec::with_capacity(eps_grid.len());
    let mut lower_source = Vec::with_capacity(eps_grid.len());
    let mut upper_source = Vec::with_capacity(eps_grid.len());
    let mut greedy = ff.as_ref().map(|_| Vec::with_capacity(eps_grid.len()));
    for &eps in eps_grid {
        let mut lo = (BigUint::one(), BoundSource::Trivial);
        let mut hi = (order.clone(), BoundSource::GroupOrder);
        let raise = |v: BigUint, s: BoundSource, lo: &mut (BigUint, BoundSource)| {
            if v > lo.0 {
                *lo = (v, s);
            }
        };
        let lower_hi = |v: BigUint, s: BoundSource, hi: &mut (BigUint, BoundSource)| {
            if v < hi.0 {
                *hi = (v, s);
            }
        };
        let measure = match counted_measure(eps) {
            Some(m) => Some(m),
            None => structured_measure(spec, kind, eps)?,
        };
        if let Some((a, b)) = measure {
            raise(a, BoundSource::ExactMeasure, &mut lo);
            lower_hi(b, BoundSource::ExactMeasure, &mut hi);
        }
        if let Some(ff) = &ff {
            let g = ff.size_at(&Threshold::new(kind, d, eps)).expect("stopped below the smallest radius");
            lower_hi(BigUint::from(g), BoundSource::GreedyCover, &mut hi);
            if let Some(v) = greedy.as_mut() {
                v.push(g);
            }
            // centres chosen while the cover radius was ≥ 2ε are 2ε-separated
            let packing = ff
                .size_at(&Threshold::new(kind, d, 2.0 * eps))
                .unwrap_or(ff.closest.len() as u64);
            raise(BigUint::from(packing), BoundSource::Packing, &mut lo);
        }
        if kind == MetricKind::Delta2 {
            if let Some(k) = &abelian {
                if let Some(b) = abelian_cover_bound(k, d, 4.0 * std::f64::consts::PI, eps, &hi.0) {
                    lower_hi(b, BoundSource::AbelianCover, &mut hi);
                }
            }
        }
        if eps > diameter && kind != MetricKind::ScaledFrobenius {
            lo = (BigUint::one(), BoundSource::Trivial);
            hi = (BigUint::one(), BoundSource::Trivial);
        }
        n_lower.push(lo.0);
        lower_source.push(lo.1);
        n_upper.push(hi.0);
        upper_source.push(hi.1);
    }

    // isotonic tightening: N' is non-increasing in ε
    for k in (0..eps_grid.len().saturating_sub(1)).rev() {
        if n_lower[k + 1] > n_lower[k] {
            n_lower[k] = n_lower[k + 1].clone();
            lower_source[k] = lower_source[k + 1];
        }
    }
    for k in 1..eps_grid.len() {
        if n_upper[k - 1] < n_upper[k] {
            n_upper[k] = n_upper[k - 1].clone();
            upper_source[k] = upper_source[k - 1];
        }
    }
    if let Some(k) = (0..eps_grid.len()).find(|&k| n_lower[k] > n_upper[k]) {
        return Err(Error::Numeric {
            msg: format!(
                "inconsistent bracket at eps = {}: lower {} > upper {}",
                eps_grid[k], n_lower[k], n_upper[k]
            ),
            partial: eps_grid[k],
        });
    }
    Ok(CoveringCurve {
        metric: kind,
        eps: eps_grid.to_vec(),
        n_lower,
        n_upper,
        lower_source,
        upper_source,
        log_order,
        greedy,
    })
}

impl CoveringCurve {
    /// A curve from explicit brackets; checks shape, ordering and monotonicity.
    pub fn from_bounds(eps: Vec<f64>, n_lower: Vec<BigUint>, n_upper: Vec<BigUint>, log_order: f64) -> Result<Self> {
        let m = eps.len();
        if m == 0 || n_lower.len() != m || n_upper.len() != m {
            return Err(Error::domain("curve arrays must be non-empty and of equal length"));
        }
        if eps.windows(2).any(|w| !(w[0] < w[1])) || !(eps[0] > 0.0) {
            return Err(Error::domain("radius grid must be positive and strictly increasing"));
        }
        if n_lower.iter().zip(&n_upper).any(|(a, b)| a > b || a.is_zero()) {
            return Err(Error::domain("need 1 <= n_lower <= n_upper"));
        }
        if n_lower.windows(2).any(|w| w[0] < w[1]) || n_upper.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("bounds must be non-increasing in eps"));
        }
        Ok(CoveringCurve {
            metric: MetricKind::Delta2,
            eps,
            n_lower,
            n_upper,
            lower_source: vec![BoundSource::Trivial; m],
            upper_source: vec![BoundSource::Trivial; m],
            log_order,
            greedy: None,
        })
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    /// CSV with columns `eps,n_lower,n_upper,method`; `method` names the
    /// lower and upper sources as `lower/upper`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,n_lower,n_upper,method\n");
        for k in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{}/{}\n",
                self.eps[k],
                self.n_lower[k],
                self.n_upper[k],
                self.lower_source[k].tag(),
                self.upper_source[k].tag()
            ));
        }
        out
    }
}

/// Bounds on the entropy integral `I = ∫₀² (ln N(ε))^{1/2} dε` and the
/// Sudakov functional `sup ε (ln N(ε))^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    pub dudley_lower: f64,
    pub dudley_upper: f64,
    pub sudakov: f64,
    /// Radius attaining `sudakov`.
    pub sudakov_eps: f64,
}

/// Relative slack that absorbs rounding in the Riemann sums.
const QUADRATURE_SLACK: f64 = 1e-12;

fn sqrt_ln(n: &BigUint) -> f64 {
    ln_bigint(&BigInt::from(n.clone())).max(0.0).sqrt()
}

/// Integrates the step functions through the brackets: on `[ε_k, ε_{k+1}]`
/// the integrand lies between its values at the right and left ends. The
/// head `(0, ε_1)` contributes at most `ε_1 (ln |G|)^{1/2}` above and
/// `ε_1 (ln n_lower(ε_1))^{1/2}` below; nothing beyond radius 2 counts.
pub fn dudley_sudakov(curve: &CoveringCurve) -> Result<EntropyReport> {
    if curve.is_empty() {
        return Err(Error::domain("empty covering curve"));
    }
    let top = 2.0;
    let eps = &curve.eps;
    let lower: Vec<f64> = curve.n_lower.iter().map(sqrt_ln).collect();
    let upper: Vec<f64> = curve.n_upper.iter().map(sqrt_ln).collect();
    let head = eps[0].min(top);
    let mut lo = head * lower[0];
    let mut hi = head * curve.log_order.max(0.0).sqrt();
    for k in 0..eps.len() {
        let a = eps[k].min(top);
        let b = if k + 1 < eps.len() { eps[k + 1].min(top) } else { top };
        if b > a {
            hi += (b - a) * upper[k];
            if k + 1 < eps.len() {
                lo += (b - a) * lower[k + 1];
            }
        }
    }
    let mut sudakov = 0.0;
    let mut sudakov_eps = eps[0];
    for k in 0..eps.len() {
        let v = eps[k] * lower[k];
        if v > sudakov {
            sudakov = v;
            sudakov_eps = eps[k];
        }
    }
    Ok(EntropyReport {
        dudley_lower: lo * (1.0 - QUADRATURE_SLACK),
        dudley_upper: hi * (1.0 + QUADRATURE_SLACK),
        sudakov,
        sudakov_eps,
    })
}

/// A set of group elements pairwise more than `beta` apart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatedSet {
    pub elements: Vec<GroupElement>,
    /// True when every group element is within `beta` of a chosen one.
    pub maximal: bool,
}

/// Greedy packing in random order. Groups of order at most `cap` are swept
/// completely (so the packing is maximal); larger ones are sampled `cap`
/// times.
pub fn separated_set(spec: &GroupSpec, beta: f64, kind: MetricKind, cap: usize, rng: &SeededRng) -> Result<SeparatedSet> {
    if !(beta > 0.0) {
        return Err(Error::domain("separation must be positive"));
    }
    let mut r = rng.rng();
    let (candidates, maximal) = match spec.order_usize().filter(|&n| n <= cap) {
        Some(n) => {
            let mut all = spec.elements(n)?;
            all.shuffle(&mut r);
            (all, true)
        }
        None => ((0..cap).map(|_| spec.sample_uniform(&mut r)).collect(), false),
    };
    let mut chosen: Vec<GroupElement> = Vec::new();
    for g in candidates {
        let mut far = true;
        for c in &chosen {
            if group_metric(spec, c, &g, kind)? <= beta {
                far = false;
                break;
            }
        }
        if far {
            chosen.push(g);
        }
    }
    Ok(SeparatedSet {
        elements: chosen,
        maximal,
    })
}

/// `ln(1/m(B_ε))` for the signed permutation group, exactly from the ball measure.
pub fn log_inverse_ball_measure_hyperoct(d: u32, eps: &BigRational) -> Result<f64> {
    let m = exactcomb::ball_measure_hyperoct(d, eps)?;
    Ok(-exactcomb::ln_ratio(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{enumerate_closure, quaternion_generators};

    fn bu(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn metric_basics() {
        let spec = GroupSpec::HyperOct { d: 4 };
        let id = spec.identity();
        let minus = GroupElement::SignedPerm(crate::groups::SignedPermElement {
            perm: crate::groups::Permutation::identity(4),
            signs: vec![-1; 4],
        });
        assert_eq!(group_metric(&spec, &id, &id, MetricKind::Delta2).unwrap(), 0.0);
        assert_eq!(group_metric(&spec, &id, &minus, MetricKind::Delta2).unwrap(), 2.0);
        assert!((group_metric(&spec, &id, &minus, MetricKind::DeltaInf).unwrap() - 2.0).abs() < 1e-9);
        let mut rng = SeededRng::new(1, 0).rng();
        for _ in 0..50 {
            let s = spec.sample_uniform(&mut rng);
            let t = spec.sample_uniform(&mut rng);
            let a = group_metric(&spec, &s, &t, MetricKind::Delta2).unwrap();
            let b = crate::matcore::delta2(spec.element_matrix(&s).unwrap().inner(), spec.element_matrix(&t).unwrap().inner())
                .unwrap();
            assert!((a - b).abs() < 1e-12);
            let sf = group_metric(&spec, &s, &t, MetricKind::ScaledFrobenius).unwrap();
            assert!((sf - 4f64.powf(0.25) * a).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_shape() {
        let g = default_eps_grid();
        assert_eq!(g.len(), 64);
        assert_eq!(g[0], 1.0 / 64.0);
        assert_eq!(g[63], 2.0);
        assert_eq!(g[54], 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn diag_sign_packing_is_exact_below_min_distance() {
        // distinct sign vectors are at distance 2√(r/d) ≥ 2/√d
        let d = 6;
        let spec = GroupSpec::DiagSign { d };
        let min_dist = 2.0 / (d as f64).sqrt();
        let eps = [0.3 * min_dist, 0.45 * min_dist, 0.9 * min_dist, 1.5, 2.5];
        let c = covering_curve(&spec, &eps, MetricKind::Delta2, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.n_lower[0], bu(64));
        assert_eq!(c.n_upper[0], bu(64));
        assert_eq!(c.n_lower[1], bu(64));
        assert_eq!(c.n_upper[2], bu(64));
        assert_eq!(c.n_lower[4], bu(1));
        assert_eq!(c.n_upper[4], bu(1));
        assert!(c.to_csv().starts_with("eps,n_lower,n_upper,method\n"));
    }

    #[test]
    fn brackets_consistent_and_monotone() {
        let q8 = GroupSpec::enumerated(enumerate_closure(&quaternion_generators(), 1e-9, 100).unwrap());
        let grid = geometric_grid(1.0 / 16.0, 2.0, 24).unwrap();
        for spec in [
            GroupSpec::HyperOct { d: 4 },
            GroupSpec::SymmetricAsUnitary { d: 5 },
            GroupSpec::DiagRoots { d: 3, n: 3 },
            q8,
            GroupSpec::HyperOct { d: 12 },
        ] {
            for kind in [MetricKind::Delta2, MetricKind::DeltaInf, MetricKind::ScaledFrobenius] {
                let c = covering_curve(&spec, &grid, kind, 2000).unwrap();
                for k in 0..c.len() {
                    assert!(c.n_lower[k] <= c.n_upper[k], "{} {kind}", spec.label());
                    assert!(BigInt::from(c.n_upper[k].clone()) <= spec.order());
                }
                assert!(c.n_lower.windows(2).all(|w| w[0] >= w[1]));
                assert!(c.n_upper.windows(2).all(|w| w[0] >= w[1]));
                let r = dudley_sudakov(&c).unwrap();
                assert!(r.sudakov <= r.dudley_upper);
                assert!(r.dudley_lower <= r.dudley_upper);
            }
        }
    }

    #[test]
    fn measure_counting_matches_exact_formula() {
        let grid = geometric_grid(0.05, 2.0, 30).unwrap();
        let spec = GroupSpec::HyperOct { d: 4 };
        let counted = covering_curve(&spec, &grid, MetricKind::Delta2, 10_000).unwrap();
        for (k, &eps) in grid.iter().enumerate() {
            let (lo, _) = structured_measure(&spec, MetricKind::Delta2, eps).unwrap().unwrap();
            assert!(counted.n_lower[k] >= lo);
        }
        let enumerated = GroupSpec::enumerated(spec.to_enumerated(1e-9, 1000).unwrap());
        let c2 = covering_curve(&enumerated, &grid, MetricKind::Delta2, 10_000).unwrap();
        assert_eq!(counted.n_lower, c2.n_lower);
    }

    #[test]
    fn dudley_closed_forms() {
        let single = CoveringCurve::from_bounds(vec![0.5, 1.0, 2.0], vec![bu(1); 3], vec![bu(1); 3], 0.0).unwrap();
        let r = dudley_sudakov(&single).unwrap();
        assert_eq!((r.dudley_lower, r.dudley_upper, r.sudakov), (0.0, 0.0, 0.0));
        let n0 = 7u64;
        let grid = default_eps_grid();
        let flat = CoveringCurve::from_bounds(grid.clone(), vec![bu(n0); 64], vec![bu(n0); 64], (n0 as f64).ln()).unwrap();
        let r = dudley_sudakov(&flat).unwrap();
        let want = 2.0 * (n0 as f64).ln().sqrt();
        assert!((r.dudley_lower - want).abs() < 1e-9 && (r.dudley_upper - want).abs() < 1e-9);
        assert!(r.sudakov <= r.dudley_upper);
        assert!(CoveringCurve::from_bounds(vec![1.0, 0.5], vec![bu(1); 2], vec![bu(1); 2], 0.0).is_err());
    }

    #[test]
    fn packing_bounded_by_cover() {
        let spec = GroupSpec::enumerated(GroupSpec::HyperOct { d: 3 }.to_enumerated(1e-9, 100).unwrap());
        let grid = geometric_grid(0.1, 2.0, 12).unwrap();
        let c = covering_curve(&spec, &grid, MetricKind::Delta2, 1000).unwrap();
        let greedy = c.greedy.clone().unwrap();
        for (k, &eps) in grid.iter().enumerate() {
            let p = separated_set(&spec, 2.0 * eps, MetricKind::Delta2, 1000, &SeededRng::new(k as u64, 0)).unwrap();
            assert!(p.maximal);
            assert!(p.elements.len() as u64 <= greedy[k]);
        }
    }

    #[test]
    fn separated_set_properties() {
        let spec = GroupSpec::HyperOct { d: 5 };
        let s = separated_set(&spec, 2.5, MetricKind::Delta2, 1000, &SeededRng::new(3, 0)).unwrap();
        assert_eq!(s.elements.len(), 1);
        let s = separated_set(&spec, 1.0, MetricKind::Delta2, 200, &SeededRng::new(3, 0)).unwrap();
        for (i, a) in s.elements.iter().enumerate() {
            for b in &s.elements[i + 1..] {
                assert!(group_metric(&spec, a, b, MetricKind::Delta2).unwrap() > 1.0);
            }
        }
        assert!(separated_set(&spec, 0.0, MetricKind::Delta2, 10, &SeededRng::new(3, 0)).is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        let spec = GroupSpec::HyperOct { d: 3 };
        assert!(covering_curve(&spec, &[], MetricKind::Delta2, 10).is_err());
        assert!(covering_curve(&spec, &[0.0, 1.0], MetricKind::Delta2, 10).is_err());
        assert!(covering_curve(&spec, &[1.0, 0.5], MetricKind::Delta2, 10).is_err());
    }
}
