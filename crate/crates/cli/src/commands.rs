use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;
use unitrace::boundsver::{self, SuiteConfig};
use unitrace::entropy::{self, MetricKind};
use unitrace::exactcomb::{ratio_to_f64, ExactDist};
use unitrace::groups::{abelian_index_upper, enumerate_closure, DEFAULT_EXHAUSTIVE_CAP};
use unitrace::io::{self, parse_group, DEFAULT_CLOSURE_CAP};
use unitrace::orlicz::{self, TABULATION_LIMIT};
use unitrace::supopt::{self, Randomization};
use unitrace::{Error, GroupSpec, SeededRng};

use crate::output::{to_value, Rendered};
use crate::{CharDistArgs, EntropyArgs, EzArgs, Failure, JordanArgs, Psi2Args, SupArgs, VerifyArgs};

pub const DEFAULT_SEED: u64 = 1;

const CHECK_COLUMNS: &[&str] = &[
    "name", "group", "d", "lhs", "relation", "rhs", "slack", "confidence", "pass", "stream", "note", "error",
];

fn group(s: &str) -> Result<GroupSpec, Failure> {
    Ok(parse_group(s, DEFAULT_CLOSURE_CAP)?)
}

/// Ratios of a quantity to the usual growth scales in `d`.
fn scales(x: f64, d: usize) -> serde_json::Value {
    let d = d as f64;
    json!({
        "over_sqrt_d": x / d.sqrt(),
        "over_sqrt_d_ln_d": if d > 1.0 { Some(x / (d * d.ln()).sqrt()) } else { None },
        "over_sqrt_d_over_ln_d": if d > 1.0 { Some(x / (d / d.ln()).sqrt()) } else { None },
    })
}

/// Exact law of `χ` for an enumerable group whose character is integral.
fn tabulated_dist(spec: &GroupSpec) -> Result<ExactDist, Failure> {
    let n = spec.order_usize().filter(|&n| n <= TABULATION_LIMIT).ok_or_else(|| {
        Error::Unsupported(format!("{} has no exact character law and is too large to tabulate", spec.label()))
    })?;
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for g in spec.elements(n)? {
        let z = spec.character(&g)?;
        let m = z.re.round();
        if (z.re - m).abs() > 1e-9 || z.im.abs() > 1e-9 {
            return Err(Error::Unsupported(format!("{} has non-integral character values", spec.label())).into());
        }
        *counts.entry(m as i64).or_default() += 1;
    }
    let total = BigRational::from_integer(n.into());
    let (support, probs) = counts
        .into_iter()
        .map(|(m, c)| (m, BigRational::from_integer(c.into()) / &total))
        .unzip();
    Ok(ExactDist::new(support, probs)?)
}

#[derive(Serialize)]
struct DistRow {
    value: i64,
    probability: String,
    probability_f64: f64,
    /// `P(χ > value)`.
    tail: String,
    tail_f64: f64,
}

pub fn char_dist(a: &CharDistArgs) -> Result<Rendered, Failure> {
    let spec = group(&a.group)?;
    let (dist, method) = match orlicz::character_dist(&spec)? {
        Some(d) => (d, "closed-form"),
        None => (tabulated_dist(&spec)?, "tabulated"),
    };
    let mut rows = Vec::new();
    let mut above = BigRational::zero();
    let pairs: Vec<(i64, BigRational)> = dist.iter().map(|(m, p)| (m, p.clone())).collect();
    for (m, p) in pairs.into_iter().rev() {
        rows.push(DistRow {
            value: m,
            probability_f64: ratio_to_f64(&p),
            probability: p.to_string(),
            tail: above.to_string(),
            tail_f64: ratio_to_f64(&above),
        });
        above += p;
    }
    rows.reverse();
    debug_assert!(above.is_one());
    let tail = a.tail.map(|k| {
        let t = dist.tail(k);
        json!({ "k": k, "probability": t.to_string(), "probability_f64": ratio_to_f64(&t) })
    });
    let result = json!({
        "group": spec.label(),
        "d": spec.dim(),
        "order": spec.order().to_string(),
        "method": method,
        "tail_at": tail,
        "rows": rows,
    });
    Ok(Rendered::new(result)?.table("rows", &["value", "probability", "probability_f64", "tail", "tail_f64"]))
}

pub fn ez(a: &EzArgs, seed: u64) -> Result<Rendered, Failure> {
    let spec = group(&a.group)?;
    let randomization: Randomization = a.randomization.parse()?;
    let d = spec.dim();
    let angles = a.angles.unwrap_or_else(|| supopt::default_angles(d));
    let rng = SeededRng::new(seed, 0);
    let est = supopt::estimate_ez(&spec, randomization, a.samples, angles, &rng)?;
    let result = json!({
        "group": spec.label(),
        "d": d,
        "randomization": randomization.to_string(),
        "angles": angles,
        "mean": est.estimate.mean,
        "sem": est.estimate.sem,
        "n": est.estimate.n,
        "mean_rigorous_error": est.mean_rigorous_error,
        "upper_4sem": est.upper(4.0),
        "lower_4sem": est.lower(4.0),
        "ratios": scales(est.estimate.mean, d),
    });
    Rendered::new(result)
}

#[derive(Serialize)]
struct CurveRow {
    eps: f64,
    n_lower: String,
    n_upper: String,
    lower_source: &'static str,
    upper_source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    greedy: Option<u64>,
}

pub fn entropy(a: &EntropyArgs) -> Result<Rendered, Failure> {
    let spec = group(&a.group)?;
    let kind: MetricKind = a.metric.parse()?;
    let grid = entropy::geometric_grid(a.eps_min, a.eps_max, a.eps_points)?;
    let curve = entropy::covering_curve(&spec, &grid, kind, a.budget)?;
    let report = entropy::dudley_sudakov(&curve)?;
    let rows: Vec<CurveRow> = (0..curve.len())
        .map(|k| CurveRow {
            eps: curve.eps[k],
            n_lower: curve.n_lower[k].to_string(),
            n_upper: curve.n_upper[k].to_string(),
            lower_source: curve.lower_source[k].tag(),
            upper_source: curve.upper_source[k].tag(),
            greedy: curve.greedy.as_ref().map(|g| g[k]),
        })
        .collect();
    let result = json!({
        "group": spec.label(),
        "d": spec.dim(),
        "metric": kind.to_string(),
        "log_order": curve.log_order,
        "dudley_lower": report.dudley_lower,
        "dudley_upper": report.dudley_upper,
        "sudakov": report.sudakov,
        "sudakov_eps": report.sudakov_eps,
        "rows": rows,
    });
    Ok(Rendered::new(result)?.table("rows", &["eps", "n_lower", "n_upper", "lower_source", "upper_source", "greedy"]))
}

pub fn psi2(a: &Psi2Args, seed: u64) -> Result<Rendered, Failure> {
    let spec = group(&a.group)?;
    let d = spec.dim();
    let mut extra = serde_json::Map::new();
    let (r, method) = match orlicz::character_dist(&spec)? {
        Some(dist) => {
            extra.insert("moment_ratio".into(), json!(orlicz::moment_ratio(&dist, a.moments)?));
            (orlicz::psi2_exact(&dist)?, "exact")
        }
        None => match orlicz::c2_constant(&spec) {
            Ok(r) => (r, "tabulated"),
            Err(Error::Unsupported(_)) => {
                let mut rng = SeededRng::new(seed, 0).rng();
                let xs = (0..a.samples)
                    .map(|_| spec.character(&spec.sample_uniform(&mut rng)).map(|z| z.norm()))
                    .collect::<Result<Vec<f64>, Error>>()?;
                extra.insert("samples".into(), json!(a.samples));
                (orlicz::psi2_empirical(&xs)?, "empirical")
            }
            Err(e) => return Err(e.into()),
        },
    };
    let mut result = serde_json::Map::new();
    result.insert("group".into(), json!(spec.label()));
    result.insert("d".into(), json!(d));
    result.insert("method".into(), json!(method));
    result.insert("norm".into(), json!(r.norm));
    result.insert("bracket_lo".into(), json!(r.bracket.0));
    result.insert("bracket_hi".into(), json!(r.bracket.1));
    result.insert("iterations".into(), json!(r.iterations));
    result.extend(extra);
    result.insert("ratios".into(), scales(r.norm, d));
    Rendered::new(result)
}

pub fn sup(a: &SupArgs) -> Result<Rendered, Failure> {
    let spec = group(&a.group)?;
    let file = io::read_matrix_file(&a.matrix)?;
    let u = file.matrix()?;
    if file.d != spec.dim() {
        return Err(Error::DimMismatch {
            expected: spec.dim(),
            got: file.d,
        }
        .into());
    }
    let angles = a.angles.unwrap_or_else(|| supopt::default_angles(spec.dim()));
    let s = supopt::sup_abs_trace(&u, &spec, angles)?;
    let defect = supopt::density_defect(&u, &spec, angles)?;
    let mut result = serde_json::Map::new();
    result.insert("group".into(), json!(spec.label()));
    result.insert("d".into(), json!(spec.dim()));
    result.insert("angles".into(), json!(angles));
    result.insert("sup".into(), to_value(&s)?);
    result.insert("density_defect".into(), to_value(&defect)?);
    let mut pass = true;
    if a.exhaustive {
        let e = supopt::sup_abs_trace_exhaustive(&u, &spec, TABULATION_LIMIT)?;
        let gap = e.value - s.value;
        pass = gap.abs() <= s.rigorous_error + 1e-9;
        result.insert("exhaustive".into(), to_value(&e)?);
        result.insert("agree".into(), json!(pass));
    }
    Ok(Rendered::new(result)?.pass(pass))
}

pub fn verify(a: &VerifyArgs, seed: Option<u64>) -> Result<Rendered, Failure> {
    let mut config = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            SuiteConfig::from_json(&text)?
        }
        None => SuiteConfig::preset(&a.suite)?,
    };
    if let Some(s) = a.samples {
        config.samples = s;
    }
    if a.angles.is_some() {
        config.angles = a.angles;
    }
    if let Some(d) = &a.dims {
        config.dims = d.clone();
    }
    if let Some(g) = &a.groups {
        config.groups = g.clone();
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    let report = boundsver::run_verification(&config)?;
    let pass = report.all_pass;
    Ok(Rendered::new(report)?.table("checks", CHECK_COLUMNS).pass(pass))
}

pub fn jordan(a: &JordanArgs) -> Result<Rendered, Failure> {
    let file = io::read_generator_file(&a.generators)?;
    let gens = file.unitaries()?;
    let g = enumerate_closure(&gens, file.tol(), a.cap)?;
    let abelian = abelian_index_upper(&g, DEFAULT_EXHAUSTIVE_CAP)?;
    let d = g.dim();
    let order = g.order();
    let closure_defect = g.closure_defect();
    let spec = GroupSpec::enumerated(g);
    let bound = boundsver::jordan_bound(d as u32)?;
    let result = json!({
        "d": d,
        "order": order,
        "generators": gens.len(),
        "tol": file.tol(),
        "closure_defect": closure_defect,
        "mean_sq_character": spec.mean_sq_character(),
        "irreducible": spec.is_irreducible(),
        "abelian_index": abelian.index.to_string(),
        "abelian_order": abelian.witness.len(),
        "abelian_exact": abelian.exact,
        "abelian_normal": abelian.normal,
        "commutator_defect": abelian.commutator_defect,
        "jordan_bound": bound.value.to_string(),
        "jordan_bound_asserted": bound.asserted,
        "within_jordan_bound": abelian.index <= bound.value,
    });
    Rendered::new(result)
}
