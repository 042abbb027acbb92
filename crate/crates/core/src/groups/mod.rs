//! Finite subgroups of U(d).
//!
//! Structured families keep elements in a compact form (a signed
//! permutation or a vector of root-of-unity exponents), so characters,
//! products and sampling cost O(d) and work at dimensions where the group
//! itself is astronomically large. Generator-defined groups are enumerated
//! explicitly; see [`enumerate_closure`].

mod abelian;
mod enumerated;
mod perm;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive};
use rand::Rng;
use serde::Serialize;

pub use abelian::{abelian_index_upper, AbelianIndex, DEFAULT_EXHAUSTIVE_CAP};
pub use enumerated::{enumerate_closure, EnumeratedGroup};
pub use perm::{Permutation, SignedPermElement};

use crate::error::{Error, Result};
use crate::exactcomb::{self, factorial};
use crate::matcore::{CMatrix, UnitaryMatrix};

/// Tolerance for deciding irreducibility of an enumerated group.
pub const IRREDUCIBLE_TOL: f64 = 1e-8;

/// A finite subgroup of U(d).
#[derive(Debug, Clone)]
pub enum GroupSpec {
    /// Signed permutation matrices, `{±1}^d ⋊ S(d)`.
    HyperOct { d: usize },
    /// Permutation matrices `u_σ`.
    SymmetricAsUnitary { d: usize },
    /// Diagonal matrices with entries ±1.
    DiagSign { d: usize },
    /// Diagonal matrices with `n`-th roots of unity on the diagonal.
    DiagRoots { d: usize, n: u32 },
    Enumerated(Arc<EnumeratedGroup>),
}

/// An element of a [`GroupSpec`], in the spec's compact representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GroupElement {
    SignedPerm(SignedPermElement),
    Perm(Permutation),
    /// Exponents `a_i` of `diag(ω^{a_1}, …, ω^{a_d})`, `ω = e^{2πi/n}`.
    Diag(Vec<u32>),
    /// Position in an enumerated group's element list.
    Index(usize),
}

pub(crate) fn root_of_unity(a: u32, n: u32) -> Complex64 {
    // exact values at the quarter points keep sign groups integral
    let (a, n) = (a as u64 % n as u64, n as u64);
    if a == 0 {
        Complex64::new(1.0, 0.0)
    } else if 2 * a == n {
        Complex64::new(-1.0, 0.0)
    } else if 4 * a == n {
        Complex64::new(0.0, 1.0)
    } else if 4 * a == 3 * n {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::from_polar(1.0, std::f64::consts::TAU * a as f64 / n as f64)
    }
}

impl GroupSpec {
    pub fn enumerated(group: EnumeratedGroup) -> Self {
        GroupSpec::Enumerated(Arc::new(group))
    }

    pub fn dim(&self) -> usize {
        match self {
            GroupSpec::HyperOct { d }
            | GroupSpec::SymmetricAsUnitary { d }
            | GroupSpec::DiagSign { d }
            | GroupSpec::DiagRoots { d, .. } => *d,
            GroupSpec::Enumerated(g) => g.dim(),
        }
    }

    /// Root order of a diagonal family.
    fn diag_modulus(&self) -> Option<u32> {
        match self {
            GroupSpec::DiagSign { .. } => Some(2),
            GroupSpec::DiagRoots { n, .. } => Some(*n),
            _ => None,
        }
    }

    /// Checks that the structured parameters are usable.
    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::domain("group dimension must be at least 1"));
        }
        if let GroupSpec::DiagRoots { n: 0, .. } = self {
            return Err(Error::domain("root order must be at least 1"));
        }
        Ok(())
    }

    /// Exact group order.
    pub fn order(&self) -> BigInt {
        let d = self.dim() as u32;
        match self {
            GroupSpec::HyperOct { .. } => factorial(d) << d,
            GroupSpec::SymmetricAsUnitary { .. } => factorial(d),
            GroupSpec::DiagSign { .. } => BigInt::one() << d,
            GroupSpec::DiagRoots { n, .. } => BigInt::from(*n).pow(d),
            GroupSpec::Enumerated(g) => BigInt::from(g.order()),
        }
    }

    /// Order as `usize` when it fits.
    pub fn order_usize(&self) -> Option<usize> {
        self.order().to_usize()
    }

    /// Short textual form, e.g. `hyperoct:16`.
    pub fn label(&self) -> String {
        match self {
            GroupSpec::HyperOct { d } => format!("hyperoct:{d}"),
            GroupSpec::SymmetricAsUnitary { d } => format!("sym:{d}"),
            GroupSpec::DiagSign { d } => format!("diag-sign:{d}"),
            GroupSpec::DiagRoots { d, n } => format!("diag-roots:{d}:{n}"),
            GroupSpec::Enumerated(g) => format!("enum(d={},order={})", g.dim(), g.order()),
        }
    }

    pub fn identity(&self) -> GroupElement {
        let d = self.dim();
        match self {
            GroupSpec::HyperOct { .. } => GroupElement::SignedPerm(SignedPermElement::identity(d)),
            GroupSpec::SymmetricAsUnitary { .. } => GroupElement::Perm(Permutation::identity(d)),
            GroupSpec::DiagSign { .. } | GroupSpec::DiagRoots { .. } => GroupElement::Diag(vec![0; d]),
            GroupSpec::Enumerated(g) => GroupElement::Index(g.identity_index()),
        }
    }

    /// Checks that `g` is an element of this group in the right form.
    pub fn check_element(&self, g: &GroupElement) -> Result<()> {
        let d = self.dim();
        let ok = match (self, g) {
            (GroupSpec::HyperOct { .. }, GroupElement::SignedPerm(e)) => e.perm.len() == d && e.signs.len() == d,
            (GroupSpec::SymmetricAsUnitary { .. }, GroupElement::Perm(p)) => p.len() == d,
            (GroupSpec::DiagSign { .. } | GroupSpec::DiagRoots { .. }, GroupElement::Diag(a)) => {
                let n = self.diag_modulus().unwrap_or(1);
                a.len() == d && a.iter().all(|&x| x < n)
            }
            (GroupSpec::Enumerated(grp), GroupElement::Index(i)) => *i < grp.order(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("{g:?} is not a valid element of {}", self.label())))
        }
    }

    /// The d×d unitary realizing `g`.
    pub fn element_matrix(&self, g: &GroupElement) -> Result<UnitaryMatrix> {
        self.check_element(g)?;
        let d = self.dim();
        let one = Complex64::new(1.0, 0.0);
        let m = match g {
            GroupElement::SignedPerm(e) => {
                let mut m = CMatrix::zeros(d);
                for i in 0..d {
                    m[(i, e.perm.apply(i))] = Complex64::new(e.signs[i] as f64, 0.0);
                }
                m
            }
            GroupElement::Perm(p) => {
                let mut m = CMatrix::zeros(d);
                for i in 0..d {
                    m[(i, p.apply(i))] = one;
                }
                m
            }
            GroupElement::Diag(a) => {
                let n = self.diag_modulus().unwrap_or(1);
                CMatrix::diagonal(&a.iter().map(|&x| root_of_unity(x, n)).collect::<Vec<_>>())
            }
            GroupElement::Index(i) => {
                let GroupSpec::Enumerated(grp) = self else { unreachable!() };
                return Ok(grp.elements()[*i].clone());
            }
        };
        Ok(UnitaryMatrix::new_unchecked(m))
    }

    /// `χ(g) = tr(π(g))`, in O(d) for the structured families.
    pub fn character(&self, g: &GroupElement) -> Result<Complex64> {
        self.check_element(g)?;
        Ok(match g {
            GroupElement::SignedPerm(e) => Complex64::new(e.trace() as f64, 0.0),
            GroupElement::Perm(p) => Complex64::new(p.fixed_points().count() as f64, 0.0),
            GroupElement::Diag(a) => {
                let n = self.diag_modulus().unwrap_or(1);
                a.iter().map(|&x| root_of_unity(x, n)).sum()
            }
            GroupElement::Index(i) => {
                let GroupSpec::Enumerated(grp) = self else { unreachable!() };
                grp.elements()[*i].inner().trace()
            }
        })
    }

    /// `Re tr(π(s)* π(t)) = Re χ(s⁻¹t)` without forming the product.
    pub fn re_inner(&self, s: &GroupElement, t: &GroupElement) -> Result<f64> {
        Ok(match (s, t) {
            (GroupElement::SignedPerm(a), GroupElement::SignedPerm(b)) => a.inner(b) as f64,
            (GroupElement::Perm(a), GroupElement::Perm(b)) => {
                (0..a.len()).filter(|&i| a.apply(i) == b.apply(i)).count() as f64
            }
            (GroupElement::Diag(a), GroupElement::Diag(b)) => {
                let n = self.diag_modulus().unwrap_or(1);
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| root_of_unity((y + n - x) % n, n).re)
                    .sum()
            }
            (GroupElement::Index(i), GroupElement::Index(j)) => {
                let GroupSpec::Enumerated(grp) = self else { unreachable!() };
                grp.elements()[*i]
                    .inner()
                    .adjoint()
                    .trace_of_product(grp.elements()[*j].inner())
                    .re
            }
            _ => {
                self.check_element(s)?;
                self.check_element(t)?;
                unreachable!("elements of one group share a representation")
            }
        })
    }

    /// Group law `g·h` (matrix product order).
    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check_element(g)?;
        self.check_element(h)?;
        Ok(match (g, h) {
            (GroupElement::SignedPerm(a), GroupElement::SignedPerm(b)) => GroupElement::SignedPerm(a.compose(b)),
            (GroupElement::Perm(a), GroupElement::Perm(b)) => GroupElement::Perm(a.then(b)),
            (GroupElement::Diag(a), GroupElement::Diag(b)) => {
                let n = self.diag_modulus().unwrap_or(1);
                GroupElement::Diag(a.iter().zip(b).map(|(x, y)| (x + y) % n).collect())
            }
            (GroupElement::Index(i), GroupElement::Index(j)) => {
                let GroupSpec::Enumerated(grp) = self else { unreachable!() };
                GroupElement::Index(grp.product_index(*i, *j)?)
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check_element(g)?;
        Ok(match g {
            GroupElement::SignedPerm(a) => GroupElement::SignedPerm(a.inverse()),
            GroupElement::Perm(a) => GroupElement::Perm(a.inverse()),
            GroupElement::Diag(a) => {
                let n = self.diag_modulus().unwrap_or(1);
                GroupElement::Diag(a.iter().map(|&x| (n - x) % n).collect())
            }
            GroupElement::Index(i) => {
                let GroupSpec::Enumerated(grp) = self else { unreachable!() };
                let inv = grp.elements()[*i].inner().adjoint();
                GroupElement::Index(
                    grp.find(&inv)?
                        .ok_or_else(|| Error::Precision("inverse not found in group".into()))?,
                )
            }
        })
    }

    /// Exactly uniform element (Fisher–Yates for permutations, fair signs
    /// and uniform exponents for the diagonal part).
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let d = self.dim();
        match self {
            GroupSpec::HyperOct { .. } => {
                let perm = Permutation::random(d, rng);
                let signs = (0..d).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
                GroupElement::SignedPerm(SignedPermElement { perm, signs })
            }
            GroupSpec::SymmetricAsUnitary { .. } => GroupElement::Perm(Permutation::random(d, rng)),
            GroupSpec::DiagSign { .. } => GroupElement::Diag((0..d).map(|_| rng.gen::<bool>() as u32).collect()),
            GroupSpec::DiagRoots { n, .. } => GroupElement::Diag((0..d).map(|_| rng.gen_range(0..*n)).collect()),
            GroupSpec::Enumerated(g) => GroupElement::Index(rng.gen_range(0..g.order())),
        }
    }

    /// A generating set.
    pub fn generators(&self) -> Vec<GroupElement> {
        let d = self.dim();
        let transposition = |i: usize| {
            let mut map: Vec<usize> = (0..d).collect();
            map.swap(i, i + 1);
            Permutation::new(map).expect("transposition")
        };
        match self {
            GroupSpec::HyperOct { .. } => {
                let mut gens: Vec<GroupElement> = (0..d.saturating_sub(1))
                    .map(|i| GroupElement::SignedPerm(SignedPermElement { perm: transposition(i), signs: vec![1; d] }))
                    .collect();
                let mut signs = vec![1; d];
                signs[0] = -1;
                gens.push(GroupElement::SignedPerm(SignedPermElement { perm: Permutation::identity(d), signs }));
                gens
            }
            GroupSpec::SymmetricAsUnitary { .. } => {
                let gens: Vec<_> = (0..d.saturating_sub(1)).map(|i| GroupElement::Perm(transposition(i))).collect();
                if gens.is_empty() {
                    vec![self.identity()]
                } else {
                    gens
                }
            }
            GroupSpec::DiagSign { .. } | GroupSpec::DiagRoots { .. } => (0..d)
                .map(|i| {
                    let mut a = vec![0; d];
                    a[i] = 1 % self.diag_modulus().unwrap_or(1);
                    GroupElement::Diag(a)
                })
                .collect(),
            GroupSpec::Enumerated(g) => g.generators().iter().map(|&i| GroupElement::Index(i)).collect(),
        }
    }

    /// Every element, when the order is at most `limit`.
    pub fn elements(&self, limit: usize) -> Result<Vec<GroupElement>> {
        let order = self.order_usize().filter(|&n| n <= limit).ok_or_else(|| {
            Error::Unsupported(format!("{} has order {} > {limit}", self.label(), self.order()))
        })?;
        let d = self.dim();
        let mut out = Vec::with_capacity(order);
        match self {
            GroupSpec::HyperOct { .. } => {
                for perm in Permutation::all(d) {
                    for mask in 0u64..(1 << d) {
                        let signs = (0..d).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
                        out.push(GroupElement::SignedPerm(SignedPermElement { perm: perm.clone(), signs }));
                    }
                }
            }
            GroupSpec::SymmetricAsUnitary { .. } => out.extend(Permutation::all(d).into_iter().map(GroupElement::Perm)),
            GroupSpec::DiagSign { .. } | GroupSpec::DiagRoots { .. } => {
                let n = self.diag_modulus().unwrap_or(1);
                let mut a = vec![0u32; d];
                loop {
                    out.push(GroupElement::Diag(a.clone()));
                    let mut k = 0;
                    while k < d {
                        a[k] += 1;
                        if a[k] < n {
                            break;
                        }
                        a[k] = 0;
                        k += 1;
                    }
                    if k == d {
                        break;
                    }
                }
            }
            GroupSpec::Enumerated(g) => out.extend((0..g.order()).map(GroupElement::Index)),
        }
        Ok(out)
    }

    /// Materializes the group by closure of its generator matrices.
    pub fn to_enumerated(&self, tol: f64, cap: usize) -> Result<EnumeratedGroup> {
        if let GroupSpec::Enumerated(g) = self {
            return Ok((**g).clone());
        }
        let gens = self
            .generators()
            .iter()
            .map(|g| self.element_matrix(g))
            .collect::<Result<Vec<_>>>()?;
        enumerate_closure(&gens, tol, cap)
    }

    /// Exact mean of `|χ|²` for the structured families.
    pub fn mean_sq_character_exact(&self) -> Option<BigRational> {
        let d = self.dim() as u32;
        match self {
            GroupSpec::HyperOct { .. } => exactcomb::char_dist_hyperoct(d).ok().map(|x| x.abs_moment(2)),
            GroupSpec::SymmetricAsUnitary { .. } => exactcomb::fixed_point_dist(d).ok().map(|x| x.abs_moment(2)),
            GroupSpec::DiagSign { .. } | GroupSpec::DiagRoots { .. } => {
                let dd = BigInt::from(d);
                // cross terms vanish unless the roots are trivial
                let v = if self.diag_modulus() == Some(1) { &dd * &dd } else { dd };
                Some(BigRational::from_integer(v))
            }
            GroupSpec::Enumerated(_) => None,
        }
    }

    /// Mean of `|χ|²` as a float.
    pub fn mean_sq_character(&self) -> f64 {
        match self {
            GroupSpec::Enumerated(g) => g.mean_sq_character(),
            _ => exactcomb::ratio_to_f64(&self.mean_sq_character_exact().expect("structured")),
        }
    }

    /// Irreducibility via `mean |χ|² = 1`: exact for structured families,
    /// within [`IRREDUCIBLE_TOL`] for enumerated ones.
    pub fn is_irreducible(&self) -> bool {
        match self.mean_sq_character_exact() {
            Some(m) => m.is_one(),
            None => (self.mean_sq_character() - 1.0).abs() <= IRREDUCIBLE_TOL,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Parses `hyperoct:D`, `sym:D`, `diag-sign:D` and `diag-roots:D:N`.
    /// Enumerated groups (`enum:FILE`) are read by [`crate::io::parse_group`].
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| -> Result<usize> {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in group spec {s:?}")))
        };
        let spec = match parts.as_slice() {
            ["hyperoct", d] => GroupSpec::HyperOct { d: num(d)? },
            ["sym", d] => GroupSpec::SymmetricAsUnitary { d: num(d)? },
            ["diag-sign", d] => GroupSpec::DiagSign { d: num(d)? },
            ["diag-roots", d, n] => GroupSpec::DiagRoots {
                d: num(d)?,
                n: num(n)? as u32,
            },
            _ => return Err(Error::Parse(format!("unrecognized group spec {s:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Generators `[[i,0],[0,-i]]` and `[[0,1],[-1,0]]` of the quaternion group Q₈ in U(2).
pub fn quaternion_generators() -> Vec<UnitaryMatrix> {
    let z = |re: f64, im: f64| Complex64::new(re, im);
    let a = CMatrix::from_row_major(2, vec![z(0.0, 1.0), z(0.0, 0.0), z(0.0, 0.0), z(0.0, -1.0)]).unwrap();
    let b = CMatrix::from_row_major(2, vec![z(0.0, 0.0), z(1.0, 0.0), z(-1.0, 0.0), z(0.0, 0.0)]).unwrap();
    vec![UnitaryMatrix::new_unchecked(a), UnitaryMatrix::new_unchecked(b)]
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::randmat::SeededRng;

    fn structured_specs() -> Vec<GroupSpec> {
        vec![
            GroupSpec::HyperOct { d: 5 },
            GroupSpec::SymmetricAsUnitary { d: 5 },
            GroupSpec::DiagSign { d: 5 },
            GroupSpec::DiagRoots { d: 4, n: 3 },
            GroupSpec::enumerated(enumerate_closure(&quaternion_generators(), 1e-9, 100).unwrap()),
        ]
    }

    fn matrix_close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).max_abs_entry() <= tol
    }

    #[test]
    fn orders() {
        assert_eq!(GroupSpec::HyperOct { d: 2 }.order(), BigInt::from(8));
        assert_eq!(GroupSpec::DiagSign { d: 7 }.order(), BigInt::from(128));
        assert_eq!(GroupSpec::SymmetricAsUnitary { d: 4 }.order(), BigInt::from(24));
        assert_eq!(GroupSpec::DiagRoots { d: 3, n: 5 }.order(), BigInt::from(125));
    }

    #[test]
    fn signed_perm_matrix_example() {
        let spec = GroupSpec::HyperOct { d: 2 };
        let g = GroupElement::SignedPerm(
            SignedPermElement::new(Permutation::new(vec![1, 0]).unwrap(), vec![1, -1]).unwrap(),
        );
        let m = spec.element_matrix(&g).unwrap();
        let z = |x: f64| Complex64::new(x, 0.0);
        assert_eq!(m.inner().as_slice(), &[z(0.0), z(1.0), z(-1.0), z(0.0)]);
        let id = spec.element_matrix(&spec.identity()).unwrap();
        assert_eq!(id.inner(), &CMatrix::identity(2));
    }

    #[test]
    fn diag_roots_generator() {
        let spec = GroupSpec::DiagRoots { d: 3, n: 4 };
        let g = &spec.generators()[1];
        let m = spec.element_matrix(g).unwrap();
        assert_eq!(m.inner()[(1, 1)], Complex64::new(0.0, 1.0));
        assert_eq!(m.inner()[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn derangement_character_is_zero() {
        let spec = GroupSpec::HyperOct { d: 3 };
        let g = GroupElement::SignedPerm(
            SignedPermElement::new(Permutation::new(vec![1, 2, 0]).unwrap(), vec![-1, 1, -1]).unwrap(),
        );
        assert_eq!(spec.character(&g).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(spec.character(&spec.identity()).unwrap(), Complex64::new(3.0, 0.0));
    }

    #[test]
    fn group_law_matches_matrices() {
        let mut rng = SeededRng::new(42, 0).rng();
        for spec in structured_specs() {
            for _ in 0..50 {
                let g = spec.sample_uniform(&mut rng);
                let h = spec.sample_uniform(&mut rng);
                let k = spec.sample_uniform(&mut rng);
                let gh = spec.compose(&g, &h).unwrap();
                let mg = spec.element_matrix(&g).unwrap();
                let mh = spec.element_matrix(&h).unwrap();
                let mgh = spec.element_matrix(&gh).unwrap();
                assert!(matrix_close(mgh.inner(), &(mg.inner() * mh.inner()), 1e-12), "{}", spec.label());
                let gi = spec.inverse(&g).unwrap();
                assert_eq!(spec.compose(&g, &gi).unwrap(), spec.identity());
                let left = spec.compose(&spec.compose(&g, &h).unwrap(), &k).unwrap();
                let right = spec.compose(&g, &spec.compose(&h, &k).unwrap()).unwrap();
                assert_eq!(left, right);
                let chi = spec.character(&g).unwrap();
                assert!((chi - mg.inner().trace()).norm() < 1e-12);
                let chi_inv = spec.character(&gi).unwrap();
                assert!((chi_inv - chi.conj()).norm() < 1e-12);
                let inner = spec.re_inner(&g, &h).unwrap();
                let via_matrix = mg.inner().adjoint().trace_of_product(mh.inner()).re;
                assert!((inner - via_matrix).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn enumerated_elements_match_order() {
        for spec in structured_specs() {
            let els = spec.elements(10_000).unwrap();
            assert_eq!(BigInt::from(els.len()), spec.order(), "{}", spec.label());
            let mut sorted = els.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), els.len());
        }
        assert!(GroupSpec::HyperOct { d: 10 }.elements(1000).is_err());
    }

    #[test]
    fn closure_of_structured_generators() {
        for spec in structured_specs() {
            let grp = spec.to_enumerated(1e-9, 10_000).unwrap();
            assert_eq!(BigInt::from(grp.order()), spec.order(), "{}", spec.label());
        }
    }

    #[test]
    fn irreducibility() {
        assert!(GroupSpec::HyperOct { d: 2 }.is_irreducible());
        assert!(GroupSpec::HyperOct { d: 9 }.is_irreducible());
        assert_eq!(
            GroupSpec::HyperOct { d: 2 }.mean_sq_character_exact().unwrap(),
            BigRational::one()
        );
        for d in 2..6 {
            assert!(!GroupSpec::DiagSign { d }.is_irreducible());
            assert_eq!(GroupSpec::DiagSign { d }.mean_sq_character(), d as f64);
            assert!(!GroupSpec::SymmetricAsUnitary { d }.is_irreducible());
        }
        assert!(GroupSpec::DiagRoots { d: 1, n: 5 }.is_irreducible());
        let q8 = GroupSpec::enumerated(enumerate_closure(&quaternion_generators(), 1e-9, 100).unwrap());
        assert!(q8.is_irreducible());
        // structured and enumerated routes agree
        let h3 = GroupSpec::enumerated(GroupSpec::HyperOct { d: 3 }.to_enumerated(1e-9, 100).unwrap());
        assert!(h3.is_irreducible());
    }

    #[test]
    fn uniform_sampling_matches_exact_tail() {
        use crate::exactcomb::{char_tail_hyperoct, ratio_to_f64};
        let d = 6u32;
        let spec = GroupSpec::HyperOct { d: d as usize };
        let n = 100_000;
        let mut rng = SeededRng::new(7, 0).rng();
        let traces: Vec<f64> = (0..n)
            .map(|_| spec.character(&spec.sample_uniform(&mut rng)).unwrap().re)
            .collect();
        for k in [-2i64, 0, 1, 3] {
            let p = ratio_to_f64(&char_tail_hyperoct(d, k).unwrap());
            let hits = traces.iter().filter(|&&t| t > k as f64).count() as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((hits - p).abs() <= 4.0 * se, "k={k}: {hits} vs {p}");
        }
    }

    #[test]
    fn diag_sign_coordinates_unbiased() {
        let spec = GroupSpec::DiagSign { d: 4 };
        let mut rng = SeededRng::new(8, 0).rng();
        let n = 20_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            if let GroupElement::Diag(a) = spec.sample_uniform(&mut rng) {
                for (c, x) in counts.iter_mut().zip(a) {
                    *c += x as usize;
                }
            }
        }
        let se = (0.25 / n as f64).sqrt();
        for c in counts {
            assert!((c as f64 / n as f64 - 0.5).abs() < 4.0 * se);
        }
    }

    #[test]
    fn parses_spec_strings() {
        assert!(matches!("hyperoct:16".parse::<GroupSpec>().unwrap(), GroupSpec::HyperOct { d: 16 }));
        assert!(matches!("sym:3".parse::<GroupSpec>().unwrap(), GroupSpec::SymmetricAsUnitary { d: 3 }));
        assert!(matches!("diag-sign:64".parse::<GroupSpec>().unwrap(), GroupSpec::DiagSign { d: 64 }));
        assert!(matches!(
            "diag-roots:2:5".parse::<GroupSpec>().unwrap(),
            GroupSpec::DiagRoots { d: 2, n: 5 }
        ));
        assert!("hyperoct:0".parse::<GroupSpec>().is_err());
        assert!("cube:3".parse::<GroupSpec>().is_err());
        assert!("hyperoct:x".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn rejects_foreign_elements() {
        let spec = GroupSpec::HyperOct { d: 3 };
        assert!(spec.character(&GroupElement::Diag(vec![0, 0, 0])).is_err());
        assert!(spec.element_matrix(&GroupElement::SignedPerm(SignedPermElement::identity(2))).is_err());
        let diag = GroupSpec::DiagRoots { d: 2, n: 3 };
        assert!(diag.character(&GroupElement::Diag(vec![0, 3])).is_err());
    }
}
