//! Search for large abelian subgroups of an enumerated group.
//!
//! A maximal set of pairwise commuting elements is automatically a subgroup,
//! so the largest abelian subgroup is a maximum clique of the commuting
//! graph. The exhaustive search grows a subgroup one element at a time and
//! closes it after every step, which keeps the branching small.

use std::collections::HashSet;

use num_bigint::BigInt;
use serde::Serialize;

use super::enumerated::EnumeratedGroup;
use crate::error::Result;

/// Default order up to which the exhaustive search runs.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelianIndex {
    /// `|G| / |Γ|` for the abelian subgroup Γ found.
    #[serde(serialize_with = "crate::io::ser_display")]
    pub index: BigInt,
    /// Element indices of Γ, sorted.
    pub witness: Vec<usize>,
    /// True when Γ is a largest abelian subgroup (exhaustive search).
    pub exact: bool,
    /// Whether Γ is normal; only checked on the exhaustive path.
    pub normal: Option<bool>,
    /// `max ‖ab - ba‖_F` over pairs in Γ.
    pub commutator_defect: f64,
}

#[derive(Clone, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    fn and(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn minus(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| k * 64 + b)
        })
    }
}

struct Exhaustive<'a> {
    table: &'a [Vec<usize>],
    commutes: Vec<BitSet>,
    best: BitSet,
    best_len: usize,
}

impl Exhaustive<'_> {
    /// `<S, v>` for a subgroup S and an element v commuting with it: the
    /// union of cosets `S v^k`.
    fn extend(&self, sub: &BitSet, v: usize) -> BitSet {
        let members: Vec<usize> = sub.iter().collect();
        let mut out = sub.clone();
        let mut power = v;
        while !out.contains(power) {
            for &s in &members {
                out.insert(self.table[s][power]);
            }
            power = self.table[power][v];
        }
        out
    }

    fn search(&mut self, sub: BitSet, mut cand: BitSet) {
        let size = sub.len();
        if size + cand.len() <= self.best_len {
            return;
        }
        let Some(v) = cand.first() else {
            self.best_len = size;
            self.best = sub;
            return;
        };
        let grown = self.extend(&sub, v);
        let next = cand.and(&self.commutes[v]).minus(&grown);
        self.search(grown, next);
        cand.remove(v);
        self.search(sub, cand);
    }
}

fn commutator_defect(group: &EnumeratedGroup, witness: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for (k, &a) in witness.iter().enumerate() {
        for &b in &witness[k + 1..] {
            let x = group.elements()[a].inner();
            let y = group.elements()[b].inner();
            worst = worst.max((&(x * y) - &(y * x)).frobenius_sq().sqrt());
        }
    }
    worst
}

/// Upper bound on the smallest index of an abelian subgroup: exact (and
/// tested for normality) when `|G| ≤ exhaustive_cap`, otherwise from a
/// greedy commuting extension.
pub fn abelian_index_upper(group: &EnumeratedGroup, exhaustive_cap: usize) -> Result<AbelianIndex> {
    let n = group.order();
    if n <= exhaustive_cap {
        exhaustive(group)
    } else {
        greedy(group)
    }
}

fn exhaustive(group: &EnumeratedGroup) -> Result<AbelianIndex> {
    let n = group.order();
    let table = group.cayley_table()?;
    let mut commutes = vec![BitSet::new(n); n];
    let mut center = BitSet::new(n);
    for i in 0..n {
        for j in 0..n {
            if table[i][j] == table[j][i] {
                commutes[i].insert(j);
            }
        }
        if commutes[i].len() == n {
            center.insert(i);
        }
    }
    let mut all = BitSet::new(n);
    (0..n).for_each(|i| all.insert(i));
    let mut search = Exhaustive {
        table: &table,
        commutes,
        best: center.clone(),
        best_len: 0,
    };
    let cand = all.minus(&center);
    search.search(center, cand);
    let witness: Vec<usize> = search.best.iter().collect();

    let identity = group.identity_index();
    let inverse: Vec<usize> = (0..n)
        .map(|i| (0..n).find(|&j| table[i][j] == identity).unwrap_or(identity))
        .collect();
    let normal = (0..n).all(|g| {
        witness
            .iter()
            .all(|&a| search.best.contains(table[table[g][a]][inverse[g]]))
    });
    Ok(AbelianIndex {
        index: BigInt::from(n / witness.len()),
        commutator_defect: commutator_defect(group, &witness),
        witness,
        exact: true,
        normal: Some(normal),
    })
}

/// Abelian subgroup grown from `start` by adding, in storage order, every
/// element that commutes with all generators chosen so far.
fn greedy_from(group: &EnumeratedGroup, start: usize) -> Result<HashSet<usize>> {
    let tol = group.tol();
    let elems = group.elements();
    let commute = |a: usize, b: usize| {
        let (x, y) = (elems[a].inner(), elems[b].inner());
        (&(x * y) - &(y * x)).frobenius_sq().sqrt() < tol
    };
    let mut gens = vec![start];
    let mut sub: HashSet<usize> = HashSet::from([group.identity_index()]);
    let close = |sub: &mut HashSet<usize>, v: usize| -> Result<()> {
        let members: Vec<usize> = sub.iter().copied().collect();
        let mut power = v;
        while !sub.contains(&power) {
            for &s in &members {
                sub.insert(group.product_index(s, power)?);
            }
            power = group.product_index(power, v)?;
        }
        Ok(())
    };
    close(&mut sub, start)?;
    for x in 0..group.order() {
        if sub.contains(&x) || !gens.iter().all(|&g| commute(g, x)) {
            continue;
        }
        gens.push(x);
        close(&mut sub, x)?;
    }
    Ok(sub)
}

fn greedy(group: &EnumeratedGroup) -> Result<AbelianIndex> {
    let n = group.order();
    let starts = n.min(32);
    let mut best: HashSet<usize> = HashSet::new();
    for s in 0..starts {
        let sub = greedy_from(group, s)?;
        if sub.len() > best.len() {
            best = sub;
        }
    }
    let mut witness: Vec<usize> = best.into_iter().collect();
    witness.sort_unstable();
    Ok(AbelianIndex {
        // |Γ| divides |G| for a genuine subgroup
        index: BigInt::from(n / witness.len()),
        commutator_defect: commutator_defect(group, &witness),
        witness,
        exact: false,
        normal: None,
    })
}
