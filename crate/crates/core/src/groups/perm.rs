use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection of `{0, …, d-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    map: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Permutation::new(map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.map
    }
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let d = map.len();
        let mut seen = vec![false; d];
        for &x in &map {
            if x >= d || std::mem::replace(&mut seen[x], true) {
                return Err(Error::domain(format!("{map:?} is not a permutation")));
            }
        }
        Ok(Permutation { map })
    }

    pub fn identity(d: usize) -> Self {
        Permutation { map: (0..d).collect() }
    }

    /// Uniform permutation by Fisher–Yates.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            let j = rng.gen_range(0..=i);
            map.swap(i, j);
        }
        Permutation { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    /// `i ↦ other(self(i))`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            map: self.map.iter().map(|&x| other.map[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { map: inv }
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.iter().enumerate().filter(|(i, &x)| *i == x).map(|(i, _)| i)
    }

    /// Lexicographic successor; `false` once the last permutation is reached.
    pub(crate) fn next_lex(map: &mut [usize]) -> bool {
        let n = map.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && map[i - 1] >= map[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while map[j] <= map[i - 1] {
            j -= 1;
        }
        map.swap(i - 1, j);
        map[i..].reverse();
        true
    }

    /// All `d!` permutations in lexicographic order.
    pub fn all(d: usize) -> Vec<Permutation> {
        let mut cur: Vec<usize> = (0..d).collect();
        let mut out = vec![Permutation { map: cur.clone() }];
        while Self::next_lex(&mut cur) {
            out.push(Permutation { map: cur.clone() });
        }
        out
    }
}

/// The signed permutation matrix `u = Σ ε_i e_{i,σ(i)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedPermElement {
    pub perm: Permutation,
    pub signs: Vec<i8>,
}

impl SignedPermElement {
    pub fn new(perm: Permutation, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != perm.len() {
            return Err(Error::DimMismatch {
                expected: perm.len(),
                got: signs.len(),
            });
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::domain("signs must be ±1"));
        }
        Ok(SignedPermElement { perm, signs })
    }

    pub fn identity(d: usize) -> Self {
        SignedPermElement {
            perm: Permutation::identity(d),
            signs: vec![1; d],
        }
    }

    /// Matrix product `self · other`: `(σ,ε)(σ',ε') = (σ'∘σ, ε_i ε'_{σ(i)})`.
    pub fn compose(&self, other: &SignedPermElement) -> SignedPermElement {
        let signs = (0..self.signs.len())
            .map(|i| self.signs[i] * other.signs[self.perm.apply(i)])
            .collect();
        SignedPermElement {
            perm: self.perm.then(&other.perm),
            signs,
        }
    }

    /// Transpose: sign `ε_i` moves to row `σ(i)`.
    pub fn inverse(&self) -> SignedPermElement {
        let mut signs = vec![1; self.signs.len()];
        for (i, &s) in self.signs.iter().enumerate() {
            signs[self.perm.apply(i)] = s;
        }
        SignedPermElement {
            perm: self.perm.inverse(),
            signs,
        }
    }

    /// `tr(u) = Σ_{i ∈ Fix(σ)} ε_i`.
    pub fn trace(&self) -> i64 {
        self.perm.fixed_points().map(|i| self.signs[i] as i64).sum()
    }

    /// `tr(self* · other) = Σ_{σ(i) = τ(i)} ε_i η_i`.
    pub fn inner(&self, other: &SignedPermElement) -> i64 {
        (0..self.signs.len())
            .filter(|&i| self.perm.apply(i) == other.perm.apply(i))
            .map(|i| (self.signs[i] * other.signs[i]) as i64)
            .sum()
    }
}
