//! Finite matrix groups given by an explicit element list, built by
//! breadth-first closure of a generator set.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{unitarity_defect, CMatrix, UnitaryMatrix};

/// Products checked when certifying closure of a large group.
const SPOT_CHECK_PAIRS: usize = 1000;

/// Two-dimensional projection hash: `p(M) = (Re⟨M,W₁⟩, Re⟨M,W₂⟩)` with fixed
/// weights of unit Frobenius norm, so `|p(A) - p(B)| ≤ ‖A - B‖_F ≤ √d δ∞(A, B)`.
/// With cell side `2√d·tol`, any stored element within δ∞ < 2·tol of a query
/// lies in one of the 9 neighbouring cells.
#[derive(Debug, Clone)]
struct ProjectionHash {
    w1: Vec<Complex64>,
    w2: Vec<Complex64>,
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl ProjectionHash {
    fn new(d: usize, tol: f64) -> Self {
        let weights = |a: f64, b: f64| -> Vec<Complex64> {
            let raw: Vec<Complex64> = (0..d * d)
                .map(|k| {
                    let t = k as f64 + 1.0;
                    Complex64::new((t * a).sin() + 0.3, (t * b).cos() - 0.2)
                })
                .collect();
            let n = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            raw.into_iter().map(|z| z / n).collect()
        };
        ProjectionHash {
            w1: weights(1.618_033_988_7, 2.414_213_562_3),
            w2: weights(3.302_775_637_7, 0.732_050_807_5),
            cell: 2.0 * (d as f64).sqrt() * tol,
            buckets: HashMap::new(),
        }
    }

    fn project(&self, m: &CMatrix) -> (f64, f64) {
        let dot = |w: &[Complex64]| -> f64 {
            m.as_slice().iter().zip(w).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
        };
        (dot(&self.w1), dot(&self.w2))
    }

    fn key(&self, m: &CMatrix) -> (i64, i64) {
        let (a, b) = self.project(m);
        ((a / self.cell).floor() as i64, (b / self.cell).floor() as i64)
    }

    fn insert(&mut self, m: &CMatrix, idx: usize) {
        let k = self.key(m);
        self.buckets.entry(k).or_default().push(idx);
    }

    fn neighbours(&self, m: &CMatrix) -> impl Iterator<Item = usize> + '_ {
        let (a, b) = self.key(m);
        (-1..=1)
            .flat_map(move |x| (-1..=1).map(move |y| (a + x, b + y)))
            .filter_map(|k| self.buckets.get(&k))
            .flatten()
            .copied()
    }
}

/// Result of matching a matrix against the stored elements.
enum Lookup {
    Found(usize, f64),
    Missing,
}

/// A finite subgroup of U(d) stored element by element.
#[derive(Debug, Clone)]
pub struct EnumeratedGroup {
    d: usize,
    tol: f64,
    elements: Vec<UnitaryMatrix>,
    generators: Vec<usize>,
    closure_defect: f64,
    hash: ProjectionHash,
}

impl EnumeratedGroup {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[UnitaryMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> Option<&UnitaryMatrix> {
        self.elements.get(i)
    }

    /// Indices of the generators within the element list.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Largest distance (Frobenius, which bounds δ∞) between a checked
    /// product or inverse and its matching stored element.
    pub fn closure_defect(&self) -> f64 {
        self.closure_defect
    }

    /// Index of the stored element within δ∞ < tol of `m`, if any.
    pub fn find(&self, m: &CMatrix) -> Result<Option<usize>> {
        match self.lookup(m)? {
            Lookup::Found(i, _) => Ok(Some(i)),
            Lookup::Missing => Ok(None),
        }
    }

    fn lookup(&self, m: &CMatrix) -> Result<Lookup> {
        let tol = self.tol;
        let wide = 2.0 * tol * (self.d as f64).sqrt();
        let mut found: Option<(usize, f64)> = None;
        for idx in self.hash.neighbours(m) {
            let diff = m - self.elements[idx].inner();
            let fro = diff.frobenius_sq().sqrt();
            let dist = if fro < tol {
                fro
            } else if fro < wide {
                let op = diff.op_norm().unwrap_or(fro);
                if op >= tol && op < 2.0 * tol {
                    return Err(Error::Precision(format!(
                        "element at operator distance {op:e} lies in the ambiguous band [tol, 2 tol) for tol = {tol:e}"
                    )));
                }
                op
            } else {
                continue;
            };
            if dist < tol {
                match found {
                    Some((prev, _)) if prev != idx => {
                        return Err(Error::Precision(format!(
                            "two stored elements within tol = {tol:e} of the same matrix"
                        )))
                    }
                    _ => found = Some((idx, fro)),
                }
            }
        }
        Ok(match found {
            Some((i, fro)) => Lookup::Found(i, fro),
            None => Lookup::Missing,
        })
    }

    fn push(&mut self, m: UnitaryMatrix) -> usize {
        let idx = self.elements.len();
        self.hash.insert(m.inner(), idx);
        self.elements.push(m);
        idx
    }

    /// Index of the product `e_i · e_j`.
    pub fn product_index(&self, i: usize, j: usize) -> Result<usize> {
        let p = self.elements[i].inner() * self.elements[j].inner();
        self.find(&p)?
            .ok_or_else(|| Error::Precision("product of two elements not found in group".into()))
    }

    /// Index of the identity (always 0 for groups built by closure).
    pub fn identity_index(&self) -> usize {
        0
    }

    /// Full multiplication table; `table[i][j]` is the index of `e_i e_j`.
    pub fn cayley_table(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.order();
        (0..n)
            .map(|i| (0..n).map(|j| self.product_index(i, j)).collect())
            .collect()
    }

    /// Mean of `|χ(g)|²` over the group.
    pub fn mean_sq_character(&self) -> f64 {
        let s: Vec<f64> = self.elements.iter().map(|u| u.inner().trace().norm_sqr()).collect();
        crate::stats::pairwise_sum(&s) / self.order() as f64
    }

    /// Conjugate every element by a fixed unitary: `w g w*`.
    pub fn conjugated(&self, w: &UnitaryMatrix) -> Result<EnumeratedGroup> {
        let wa = w.adjoint();
        let mut out = EnumeratedGroup {
            d: self.d,
            tol: self.tol,
            elements: Vec::with_capacity(self.order()),
            generators: self.generators.clone(),
            closure_defect: 0.0,
            hash: ProjectionHash::new(self.d, self.tol),
        };
        for u in &self.elements {
            let m = w.mul(u).mul(&wa);
            out.push(m);
        }
        out.closure_defect = out.certify()?;
        Ok(out)
    }

    /// Checks products and inverses against the stored list: exhaustively
    /// when the group is small, otherwise on a fixed pseudo-random sample of
    /// pairs. Returns the worst mismatch.
    fn certify(&self) -> Result<f64> {
        let n = self.order();
        let mut worst = 0.0f64;
        let mut check = |m: &CMatrix| -> Result<()> {
            match self.lookup(m)? {
                Lookup::Found(_, fro) => {
                    worst = worst.max(fro);
                    Ok(())
                }
                Lookup::Missing => Err(Error::Precision(
                    "group is not closed under products within tolerance".into(),
                )),
            }
        };
        if n * n <= 4 * SPOT_CHECK_PAIRS {
            for a in &self.elements {
                for b in &self.elements {
                    check(&(a.inner() * b.inner()))?;
                }
            }
        } else {
            let mut state = 0x2545_F491_4F6C_DD1Du64;
            for _ in 0..SPOT_CHECK_PAIRS {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let i = (state % n as u64) as usize;
                let j = ((state >> 32) % n as u64) as usize;
                check(&(self.elements[i].inner() * self.elements[j].inner()))?;
            }
        }
        for a in &self.elements {
            check(&a.inner().adjoint())?;
        }
        Ok(worst)
    }
}

/// Breadth-first closure of `generators` under multiplication. Two matrices
/// are identified when their operator-norm distance is below `tol`; a pair
/// at distance in `[tol, 2·tol)` is reported as a precision error. Fails with
/// [`Error::CapExceeded`] once more than `cap` elements have been found.
pub fn enumerate_closure(generators: &[UnitaryMatrix], tol: f64, cap: usize) -> Result<EnumeratedGroup> {
    let d = match generators.first() {
        Some(g) => g.dim(),
        None => return Err(Error::domain("at least one generator is required")),
    };
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    for g in generators {
        if g.dim() != d {
            return Err(Error::DimMismatch { expected: d, got: g.dim() });
        }
        let defect = unitarity_defect(g.inner());
        if defect > tol {
            return Err(Error::domain(format!("generator not unitary within tol: defect {defect:e}")));
        }
    }
    let mut group = EnumeratedGroup {
        d,
        tol,
        elements: Vec::new(),
        generators: Vec::new(),
        closure_defect: 0.0,
        hash: ProjectionHash::new(d, tol),
    };
    group.push(UnitaryMatrix::identity(d));
    for g in generators {
        let idx = match group.lookup(g.inner())? {
            Lookup::Found(i, _) => i,
            Lookup::Missing => group.push(g.clone()),
        };
        group.generators.push(idx);
    }
    let mut head = 0;
    while head < group.order() {
        for gi in 0..group.generators.len() {
            let g = group.generators[gi];
            let p = group.elements[head].inner() * group.elements[g].inner();
            if let Lookup::Missing = group.lookup(&p)? {
                if group.order() >= cap {
                    return Err(Error::CapExceeded {
                        cap,
                        count: group.order(),
                    });
                }
                group.push(UnitaryMatrix::new_unchecked(p));
            }
        }
        head += 1;
    }
    group.closure_defect = group.certify()?;
    if group.closure_defect > tol {
        return Err(Error::Precision(format!(
            "closure defect {:e} exceeds tol {tol:e}",
            group.closure_defect
        )));
    }
    Ok(group)
}
