//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Oracles here are deliberately naive (explicit enumeration of
//! permutations and signs, brute-force assignment search, direct counting)
//! so they share as little code as possible with the library paths they
//! check.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use unitrace::boundsver::{ball_measure, tail_sandwich};
use unitrace::entropy::{self, covering_curve, dudley_sudakov, MetricKind};
use unitrace::exactcomb::{self, factorial, ln_bigint};
use unitrace::io::{matrix_to_pairs, GeneratorFile, MatrixFile, DEFAULT_TOL};
use unitrace::orlicz::{self, moment_ratio, psi2_atoms, psi2_empirical, psi2_exact};
use unitrace::randmat::{haar_unitary, standard_normal_pair};
use unitrace::supopt::{self, c3_constant_unchecked, estimate_ez, lap_max, sup_abs_trace, EzEstimate, Randomization};
use unitrace::{CMatrix, GroupSpec, SeededRng};

const SEED: u64 = 1;

type Outcome = Result<String, String>;
type Criterion = (&'static str, f64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("exact combinatorics", 10.0, exact_combinatorics),
        ("supremum oracle equivalence", 120.0, supremum_oracle),
        ("growth-rate stability", 600.0, growth_rates),
        ("tb2 dominance and diagonal band", f64::INFINITY, tb2_dominance),
        ("entropy chain", f64::INFINITY, entropy_chain),
        ("psi2 solver", f64::INFINITY, psi2_solver),
        ("fl1 constant equivalence", f64::INFINITY, fl1_equivalence),
        ("cli reproducibility", f64::INFINITY, cli_reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        // time spent filling the shared Monte Carlo cache counts against criterion 3 only
        let outcome = match outcome {
            Ok(_) if secs > *budget => Err(format!("took {secs:.1} s, budget {budget} s")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail}; {secs:.1} s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({why}; {secs:.1} s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// brute-force helpers

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Traces of all `2^d d!` signed permutation matrices.
fn signed_perm_traces(d: usize) -> Vec<i64> {
    let mut out = Vec::new();
    for p in permutations(d) {
        for signs in 0u32..(1 << d) {
            let tr: i64 = (0..d)
                .filter(|&i| p[i] == i)
                .map(|i| if (signs >> i) & 1 == 1 { -1 } else { 1 })
                .sum();
            out.push(tr);
        }
    }
    out
}

fn big(n: usize) -> BigInt {
    BigInt::from(n)
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

// ---------------------------------------------------------------------------
// 1

fn exact_combinatorics() -> Outcome {
    // D(n): closed form, recurrence, brute force
    let mut rec = vec![BigInt::one(), BigInt::zero()];
    for n in 2..=8usize {
        let next = big(n - 1) * (&rec[n - 1] + &rec[n - 2]);
        rec.push(next);
    }
    for n in 0..=8u32 {
        let brute = permutations(n as usize)
            .iter()
            .filter(|p| p.iter().enumerate().all(|(i, &j)| i != j))
            .count();
        let a = exactcomb::derangements(n);
        let b = exactcomb::derangements_inclusion_exclusion(n);
        ensure(a == b && a == rec[n as usize] && a == big(brute), || {
            format!("D({n}): library {a}, formula {b}, recurrence {}, brute force {brute}", rec[n as usize])
        })?;
    }
    // fixed-point counts against enumeration where feasible
    for d in 1..=8u32 {
        let mut counts = vec![0usize; d as usize + 1];
        for p in permutations(d as usize) {
            counts[p.iter().enumerate().filter(|&(i, &j)| i == j).count()] += 1;
        }
        let lib = exactcomb::fixed_point_counts(d);
        ensure(lib.iter().zip(&counts).all(|(a, &b)| *a == big(b)), || format!("X_j mismatch at d = {d}"))?;
    }
    // Σ X_j = d! and X_j/d! ≤ 1/j!
    for d in 0..=12u32 {
        let x = exactcomb::fixed_point_counts(d);
        let total: BigInt = x.iter().sum();
        ensure(total == factorial(d), || format!("sum X_j != d! at d = {d}"))?;
        for (j, xj) in x.iter().enumerate() {
            ensure(xj * factorial(j as u32) <= factorial(d), || format!("X_{j}/d! > 1/j! at d = {d}"))?;
        }
    }
    // tails: library vs enumeration, then the sandwich
    for d in 1..=6u32 {
        let traces = signed_perm_traces(d as usize);
        let n = traces.len() as i64;
        for k in -(d as i64) - 1..=d as i64 {
            let above = traces.iter().filter(|&&t| t > k).count() as i64;
            let lib = exactcomb::char_tail_hyperoct(d, k).map_err(|e| e.to_string())?;
            ensure(lib == rat(above, n), || format!("P(tr > {k}) at d = {d}: {lib} vs {above}/{n}"))?;
        }
    }
    let mut worst_upper = 0.0f64;
    for d in 1..=12u32 {
        let s = tail_sandwich(d).map_err(|e| e.to_string())?;
        ensure(s.lower_holds && s.upper_holds, || format!("sandwich fails at d = {d}: {s:?}"))?;
        // independent restatement with rationals: e > 2718281/10^6
        let e_lo = rat(2_718_281, 1_000_000);
        let floor = BigRational::new(BigInt::one(), factorial(d) << d);
        for k in 0..d as i64 {
            let t = exactcomb::char_tail_hyperoct(d, k).map_err(|e| e.to_string())?;
            let k1 = (k + 1) as u32;
            let bound = num_traits::pow(e_lo.clone(), k1 as usize + 1) / BigRational::from_integer(BigInt::from(k1).pow(k1));
            ensure(t >= floor && t <= bound, || format!("sandwich oracle fails at d = {d}, k = {k}"))?;
        }
        worst_upper = worst_upper.max(s.upper_ratio);
    }
    // d = 2 law against its 8 elements
    let traces = signed_perm_traces(2);
    ensure(traces.len() == 8, || "expected 8 elements".into())?;
    let dist = exactcomb::char_dist_hyperoct(2).map_err(|e| e.to_string())?;
    for m in -3..=3i64 {
        let c = traces.iter().filter(|&&t| t == m).count() as i64;
        ensure(dist.prob(m) == rat(c, 8), || format!("P(tr = {m}) at d = 2"))?;
    }
    Ok(format!("D(n) n<=8, X_j d<=12, sandwich d<=12 exact; max tail/upper = {worst_upper:.3}"))
}

// ---------------------------------------------------------------------------
// 2

fn brute_lap(d: usize, cost: &[f64], perms: &[Vec<usize>]) -> f64 {
    perms
        .iter()
        .map(|p| (0..d).fold(0.0, |acc, i| acc + cost[p[i] * d + i]))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn supremum_oracle() -> Outcome {
    let mut worst_gap = 0.0f64;
    let mut compared = 0;
    for d in 2..=5usize {
        let spec = GroupSpec::HyperOct { d };
        let elements: Vec<CMatrix> = spec
            .elements(10_000)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|g| spec.element_matrix(g).map(|m| m.into_inner()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        ensure(elements.len() == (1 << d) * factorial(d as u32).to_usize().unwrap(), || "order".into())?;
        let angles = supopt::default_angles(d);
        for i in 0..100u64 {
            let u = haar_unitary(d, &mut SeededRng::new(SEED, 1000 * d as u64 + i).rng())
                .map_err(|e| e.to_string())?
                .into_inner();
            let exact = elements
                .iter()
                .map(|v| u.trace_of_product(v).norm())
                .fold(0.0, f64::max);
            let s = sup_abs_trace(&u, &spec, angles).map_err(|e| e.to_string())?;
            ensure(s.value <= exact + 1e-9 && exact <= s.value + s.rigorous_error + 1e-9, || {
                format!("d = {d}, sample {i}: sweep {} (error {}) vs enumeration {exact}", s.value, s.rigorous_error)
            })?;
            worst_gap = worst_gap.max(exact - s.value);
            compared += 1;
        }
    }
    let mut lap_cases = 0;
    for d in 1..=7usize {
        let perms = permutations(d);
        for i in 0..200u64 {
            let mut rng = SeededRng::new(SEED, 50_000 + 1000 * d as u64 + i).rng();
            let mut cost = Vec::with_capacity(d * d);
            while cost.len() < d * d {
                let (a, b) = standard_normal_pair(&mut rng);
                cost.push(a);
                cost.push(b);
            }
            cost.truncate(d * d);
            let r = lap_max(d, &cost).map_err(|e| e.to_string())?;
            let best = brute_lap(d, &cost, &perms);
            let recomputed = (0..d).fold(0.0, |acc, i| acc + cost[r.assignment.apply(i) * d + i]);
            ensure(r.value == best && recomputed == r.value, || {
                format!("lap_max d = {d}, case {i}: {} vs brute force {best}", r.value)
            })?;
            lap_cases += 1;
        }
    }
    Ok(format!(
        "{compared} Haar unitaries d=2..5, max enumeration-sweep gap {worst_gap:.2e}; {lap_cases} LAP cases exact"
    ))
}

// ---------------------------------------------------------------------------
// 3 and 4 share the Gaussian estimates

const GROWTH_DIMS: [usize; 4] = [8, 16, 32, 64];
const GROWTH_SAMPLES: usize = 400;
const GROWTH_ANGLES: usize = 512;

fn family(name: &str, d: usize) -> GroupSpec {
    match name {
        "hyperoct" => GroupSpec::HyperOct { d },
        "sym" => GroupSpec::SymmetricAsUnitary { d },
        "diag-sign" => GroupSpec::DiagSign { d },
        _ => unreachable!(),
    }
}

fn gaussian_ez() -> &'static BTreeMap<(&'static str, usize), EzEstimate> {
    static CACHE: OnceLock<BTreeMap<(&'static str, usize), EzEstimate>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut out = BTreeMap::new();
        for (f, name) in ["hyperoct", "sym", "diag-sign"].into_iter().enumerate() {
            for d in GROWTH_DIMS {
                let rng = SeededRng::new(SEED, ((f as u64 + 1) << 32) | d as u64);
                let est = estimate_ez(&family(name, d), Randomization::Gaussian, GROWTH_SAMPLES, GROWTH_ANGLES, &rng)
                    .expect("estimate");
                out.insert((name, d), est);
            }
        }
        out
    })
}

fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ")
}

fn growth_rates() -> Outcome {
    let ez = gaussian_ez();
    let mut parts = Vec::new();
    for name in ["hyperoct", "sym"] {
        let r: Vec<f64> = GROWTH_DIMS
            .iter()
            .map(|&d| ez[&(name, d)].estimate.mean / (d as f64 * (d as f64).ln()).sqrt())
            .collect();
        let s = spread(&r);
        ensure(s <= 2.0, || format!("{name} EZ/sqrt(d ln d) = [{}], spread {s}", fmt_list(&r)))?;
        parts.push(format!("{name} EZ ratios [{}] spread {s:.3}", fmt_list(&r)));
    }
    let c2: Vec<f64> = GROWTH_DIMS
        .iter()
        .map(|&d| {
            let r = orlicz::c2_constant(&GroupSpec::HyperOct { d }).expect("c2");
            r.norm / (d as f64 / (d as f64).ln()).sqrt()
        })
        .collect();
    let s = spread(&c2);
    ensure(s <= 2.0, || format!("C2/sqrt(d/ln d) = [{}], spread {s}", fmt_list(&c2)))?;
    parts.push(format!("C2 ratios [{}] spread {s:.3}", fmt_list(&c2)));
    Ok(parts.join("; "))
}

// ---------------------------------------------------------------------------
// 4

fn tb2_dominance() -> Outcome {
    let ez = gaussian_ez();
    let mut worst = 0.0f64;
    for d in [8usize, 16, 32] {
        let est = &ez[&("hyperoct", d)];
        let ln_k = ln_bigint(&(factorial(d as u32) << d));
        let rhs = (2.0 * ln_k).sqrt() + (d as f64).sqrt();
        let lhs = est.upper(4.0);
        ensure(lhs <= rhs, || format!("d = {d}: mean + 4 sem = {lhs} > {rhs}"))?;
        worst = worst.max(lhs / rhs);
    }
    let mut band = Vec::new();
    for d in [8usize, 16, 32] {
        let est = &ez[&("diag-sign", d)];
        let s = (d as f64).sqrt();
        ensure(est.lower(4.0) >= 0.5 * s && est.upper(4.0) <= 1.5 * s, || {
            format!("diag-sign d = {d}: [{}, {}] outside [{}, {}]", est.lower(4.0), est.upper(4.0), 0.5 * s, 1.5 * s)
        })?;
        band.push(est.estimate.mean / s);
    }
    Ok(format!("max (EZ + 4 sem)/tb2 = {worst:.3}; diag-sign EZ/sqrt(d) = [{}]", fmt_list(&band)))
}

// ---------------------------------------------------------------------------
// 5

const RADII: &[(i64, i64)] = &[(3, 16), (5, 16), (7, 16), (11, 16), (13, 16), (9, 8), (21, 16), (27, 16), (31, 16)];

fn inverse_ceil(m: &BigRational) -> BigInt {
    m.recip().ceil().to_integer()
}

fn inverse_floor(m: &BigRational) -> BigInt {
    m.recip().floor().to_integer()
}

/// Counts `δ₂(g, 1) < ε` directly from element matrices.
fn counted_ball(spec: &GroupSpec, eps: f64) -> Result<BigRational, String> {
    let d = spec.dim() as f64;
    let els = spec.elements(10_000).map_err(|e| e.to_string())?;
    let mut inside = 0i64;
    for g in &els {
        let m = spec.element_matrix(g).map_err(|e| e.to_string())?;
        let dist_sq = (2.0 * d - 2.0 * m.inner().trace().re) / d;
        if dist_sq.max(0.0).sqrt() < eps {
            inside += 1;
        }
    }
    Ok(rat(inside, els.len() as i64))
}

fn entropy_chain() -> Outcome {
    let mut curves = 0;
    let mut sudakov_ok = |c: &entropy::CoveringCurve, label: &str| -> Result<(), String> {
        let r = dudley_sudakov(c).map_err(|e| e.to_string())?;
        curves += 1;
        ensure(r.sudakov <= r.dudley_upper, || format!("{label}: Sudakov {} > Dudley upper {}", r.sudakov, r.dudley_upper))
    };

    // measure chain on every enumerable group in the test family
    let q8 = unitrace::groups::enumerate_closure(&unitrace::groups::quaternion_generators(), DEFAULT_TOL, 100)
        .map_err(|e| e.to_string())?;
    let mut groups: Vec<GroupSpec> = vec![GroupSpec::enumerated(q8)];
    for d in 2..=5 {
        groups.push(GroupSpec::HyperOct { d });
        let e = GroupSpec::HyperOct { d }.to_enumerated(DEFAULT_TOL, 10_000).map_err(|e| e.to_string())?;
        groups.push(GroupSpec::enumerated(e));
    }
    for d in 2..=7 {
        groups.push(GroupSpec::SymmetricAsUnitary { d });
    }
    for d in 2..=10 {
        groups.push(GroupSpec::DiagSign { d });
    }
    groups.push(GroupSpec::DiagRoots { d: 3, n: 5 });
    groups.push(GroupSpec::DiagRoots { d: 1, n: 12 });
    let radii: Vec<f64> = RADII.iter().map(|&(p, q)| p as f64 / q as f64).collect();
    let mut chain_checks = 0;
    for spec in &groups {
        let label = spec.label();
        let order = spec.order_usize().unwrap();
        ensure(order <= 10_000, || format!("{label} too large"))?;
        let curve = covering_curve(spec, &radii, MetricKind::Delta2, 10_000).map_err(|e| e.to_string())?;
        let greedy = curve.greedy.clone().ok_or_else(|| format!("{label}: no greedy cover"))?;
        for (k, &(p, q)) in RADII.iter().enumerate() {
            let eps = rat(p, q);
            let half = rat(p, 2 * q);
            let full_m = ball_measure(spec, &eps, 10_000).map_err(|e| e.to_string())?;
            let half_m = ball_measure(spec, &half, 10_000).map_err(|e| e.to_string())?;
            ensure(full_m == counted_ball(spec, radii[k])? && half_m == counted_ball(spec, radii[k] / 2.0)?, || {
                format!("{label}: ball measure disagrees with counting at eps = {p}/{q}")
            })?;
            let n = BigInt::from(greedy[k]);
            ensure(inverse_ceil(&full_m) <= n && n <= inverse_floor(&half_m), || {
                format!("{label} eps = {p}/{q}: 1/m(B) = {}, greedy = {n}, 1/m(B/2) = {}", full_m.recip(), half_m.recip())
            })?;
            let lo = BigInt::from(curve.n_lower[k].clone());
            let hi = BigInt::from(curve.n_upper[k].clone());
            ensure(lo <= n && n <= hi, || format!("{label} eps = {p}/{q}: bracket [{lo}, {hi}] misses greedy {n}"))?;
            chain_checks += 1;
        }
        sudakov_ok(&curve, &label)?;
    }

    // el1 in log form with k = d! (diagonal sign subgroup)
    let el1_radii = [0.25, 0.5, 1.0];
    let mut el1_worst = f64::NEG_INFINITY;
    for d in 2..=16usize {
        let spec = GroupSpec::HyperOct { d };
        let curve = covering_curve(&spec, &el1_radii, MetricKind::Delta2, 10_000).map_err(|e| e.to_string())?;
        for (k, &eps) in el1_radii.iter().enumerate() {
            let n: BigUint = match &curve.greedy {
                Some(g) => BigUint::from(g[k]),
                None => curve.n_upper[k].clone(),
            };
            let lhs = ln_bigint(&BigInt::from(n));
            let rhs = ln_bigint(&factorial(d as u32)) + d as f64 * (2.0 * PI / eps).ln();
            ensure(lhs <= rhs, || format!("el1 at d = {d}, eps = {eps}: {lhs} > {rhs}"))?;
            el1_worst = el1_worst.max(lhs - rhs);
        }
        sudakov_ok(&curve, &spec.label())?;
    }

    // pe32 at eps = 1/2: ln(1/m(B)) >= (7/8) d ln(d/e) - c3, c3 fitted at d = 8
    let half = rat(1, 2);
    for d in 2..=6u32 {
        let traces = signed_perm_traces(d as usize);
        // δ₂ < 1/2 ⇔ tr > d(1 - 1/8)
        let inside = traces.iter().filter(|&&t| 8 * t > 7 * d as i64).count() as i64;
        let lib = exactcomb::ball_measure_hyperoct(d, &half).map_err(|e| e.to_string())?;
        ensure(lib == rat(inside, traces.len() as i64), || format!("m(B_1/2) at d = {d}"))?;
    }
    let lhs = |d: u32| entropy::log_inverse_ball_measure_hyperoct(d, &half).map_err(|e| e.to_string());
    let shape = |d: u32| 0.875 * d as f64 * (d as f64 / E).ln();
    let c3 = (shape(8) - lhs(8)?).max(0.0);
    let mut pe32_margin = f64::INFINITY;
    for d in [12u32, 16, 24] {
        let (l, r) = (lhs(d)?, shape(d) - c3);
        ensure(l >= r, || format!("pe32 at d = {d}: {l} < {r} (c3 = {c3})"))?;
        pe32_margin = pe32_margin.min(l - r);
    }
    for d in [8usize, 12, 16, 24, 32, 64] {
        let spec = GroupSpec::HyperOct { d };
        let curve = covering_curve(&spec, &entropy::default_eps_grid(), MetricKind::Delta2, 10_000).map_err(|e| e.to_string())?;
        sudakov_ok(&curve, &spec.label())?;
    }
    Ok(format!(
        "{chain_checks} exact chain checks on {} groups; el1 worst log gap {el1_worst:.2}; pe32 c3 = {c3:.3}, min margin {pe32_margin:.3}; Sudakov <= Dudley on {curves} curves",
        groups.len()
    ))
}

// ---------------------------------------------------------------------------
// 6

fn psi2_solver() -> Outcome {
    let point = psi2_atoms(&[(3.0, 1.0)]).map_err(|e| e.to_string())?;
    let rad = psi2_atoms(&[(1.0, 0.5), (1.0, 0.5)]).map_err(|e| e.to_string())?;
    let two = psi2_atoms(&[(0.0, 0.5), (2.0, 0.5)]).map_err(|e| e.to_string())?;
    let two_exact = 2.0 / (2.0 * E - 1.0).ln().sqrt();
    for (got, want, what) in [(point.norm, 3.0, "point mass"), (rad.norm, 1.0, "Rademacher"), (two.norm, two_exact, "{0,2}")] {
        ensure((got - want).abs() <= 1e-9, || format!("{what}: {got} vs {want}"))?;
    }
    // the exact-law path gives the same closed forms
    let rademacher = exactcomb::rademacher_sum_dist(1).map_err(|e| e.to_string())?;
    ensure((psi2_exact(&rademacher).map_err(|e| e.to_string())?.norm - 1.0).abs() <= 1e-9, || "Rademacher law".into())?;

    let mut rel = Vec::new();
    for d in [4usize, 8] {
        let spec = GroupSpec::HyperOct { d };
        let exact = psi2_exact(&exactcomb::char_dist_hyperoct(d as u32).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .norm;
        let mut rng = SeededRng::new(SEED, 7000 + d as u64).rng();
        let xs: Vec<f64> = (0..100_000)
            .map(|_| spec.character(&spec.sample_uniform(&mut rng)).map(|z| z.norm()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let emp = psi2_empirical(&xs).map_err(|e| e.to_string())?.norm;
        let r = (emp - exact).abs() / exact;
        ensure(r <= 0.10, || format!("HyperOct{{{d}}}: empirical {emp} vs exact {exact}"))?;
        rel.push(r);
    }

    let mut laws = Vec::new();
    for d in (1..=16u32).chain([24, 32, 64]) {
        laws.push((format!("hyperoct:{d}"), exactcomb::char_dist_hyperoct(d).map_err(|e| e.to_string())?));
        laws.push((format!("sym:{d}"), exactcomb::fixed_point_dist(d).map_err(|e| e.to_string())?));
        laws.push((format!("diag-sign:{d}"), exactcomb::rademacher_sum_dist(d).map_err(|e| e.to_string())?));
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (label, law) in &laws {
        let norm = psi2_exact(law).map_err(|e| e.to_string())?.norm;
        let ratio = moment_ratio(law, 128).map_err(|e| e.to_string())? / norm;
        ensure((0.25..=4.0).contains(&ratio), || format!("{label}: moment ratio / psi2 = {ratio}"))?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok(format!(
        "closed forms within 1e-9; empirical rel. error [{}]; moment ratio / psi2 in [{lo:.3}, {hi:.3}] over {} laws",
        fmt_list(&rel),
        laws.len()
    ))
}

// ---------------------------------------------------------------------------
// 7

fn fl1_equivalence() -> Outcome {
    let q8 = unitrace::groups::enumerate_closure(&unitrace::groups::quaternion_generators(), DEFAULT_TOL, 100)
        .map_err(|e| e.to_string())?;
    let mut family = vec![GroupSpec::enumerated(q8)];
    for d in [4usize, 8, 16] {
        family.push(GroupSpec::HyperOct { d });
        family.push(GroupSpec::SymmetricAsUnitary { d });
    }
    for n in [2u32, 3, 5, 8] {
        family.push(GroupSpec::DiagRoots { d: 1, n });
    }
    let mut worst = 0.0f64;
    for (i, spec) in family.iter().enumerate() {
        let label = spec.label();
        let d = spec.dim() as f64;
        let c2 = orlicz::c2_constant(spec).map_err(|e| e.to_string())?.norm;
        let rng = SeededRng::new(SEED, 9000 + i as u64);
        let c3 = c3_constant_unchecked(spec, 400, supopt::default_angles(spec.dim()), &rng).map_err(|e| e.to_string())?;
        let (c3_lo, c3_hi) = (c3.lower(4.0), c3.upper(4.0));
        let ratio = (c2 / c3_lo).max(c3_hi / c2);
        ensure(c3_lo > 0.0 && ratio <= 8.0, || format!("{label}: C2 = {c2}, C3 in [{c3_lo}, {c3_hi}]"))?;
        ensure(c3_lo <= d, || format!("{label}: C3 >= {c3_lo} exceeds d = {d}"))?;
        worst = worst.max(ratio);
    }
    Ok(format!("max(C2/C3, C3/C2) <= {worst:.3} over {} groups; C3 <= d throughout", family.len()))
}

// ---------------------------------------------------------------------------
// 8

fn cli_reproducibility() -> Outcome {
    let dir = std::env::temp_dir().join(format!("unitrace-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let u = haar_unitary(5, &mut SeededRng::new(SEED, 42).rng()).map_err(|e| e.to_string())?;
    let matrix = dir.join("u.json");
    let file = MatrixFile {
        d: 5,
        tol: None,
        matrix: matrix_to_pairs(u.inner()),
    };
    std::fs::write(&matrix, serde_json::to_string(&file).unwrap()).map_err(|e| e.to_string())?;
    let gens = dir.join("q8.json");
    let file = GeneratorFile {
        d: 2,
        tol: None,
        generators: unitrace::groups::quaternion_generators().iter().map(|g| matrix_to_pairs(g.inner())).collect(),
    };
    std::fs::write(&gens, serde_json::to_string(&file).unwrap()).map_err(|e| e.to_string())?;
    let (m, g) = (matrix.to_str().unwrap(), gens.to_str().unwrap());
    let invocations: Vec<Vec<&str>> = vec![
        vec!["char-dist", "--group", "hyperoct:12", "--tail", "3"],
        vec!["ez", "--group", "diag-sign:64", "--samples", "400", "--seed", "7"],
        vec!["ez", "--group", "sym:12", "--samples", "100", "--randomization", "haar", "--seed", "3"],
        vec!["entropy", "--group", "hyperoct:5", "--eps-points", "16"],
        vec!["psi2", "--group", "diag-roots:20:3", "--samples", "2000", "--seed", "5"],
        vec!["sup", "--group", "hyperoct:5", "--matrix", m, "--exhaustive"],
        vec!["verify", "--suite", "hyperoct-core", "--dims", "4,6", "--samples", "40"],
        vec!["jordan", "--generators", g],
    ];
    let mut runs = 0;
    for args in &invocations {
        for format in ["json", "csv"] {
            let mut reference: Option<Vec<u8>> = None;
            for threads in ["1", "2", "4", "1"] {
                let out = Command::new(env!("CARGO_BIN_EXE_unitrace"))
                    .args(args)
                    .args(["--format", format, "--threads", threads])
                    .output()
                    .map_err(|e| e.to_string())?;
                ensure(out.status.success(), || format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))?;
                runs += 1;
                match &reference {
                    None => reference = Some(out.stdout),
                    Some(r) => ensure(*r == out.stdout, || format!("{args:?} --format {format}: output differs at --threads {threads}"))?,
                }
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{runs} runs of {} invocations byte-identical across --threads 1/2/4", invocations.len()))
}
