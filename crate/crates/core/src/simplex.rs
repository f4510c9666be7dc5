//! The dilated standard simplex `n·Δ^r` on the hyperplane `x_1 + ... + x_{r+1} = n`.
//!
//! Lattice points are nonnegative integer tuples summing to `n`. Their
//! lexicographic rank is the point index used by every triangulation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DilatedSimplex {
    pub r: usize,
    pub n: u64,
}

impl DilatedSimplex {
    pub fn new(r: usize, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "dilation level must be positive".into(),
            ));
        }
        Ok(DilatedSimplex { r, n })
    }

    pub fn num_points(&self) -> usize {
        binomial(self.n as usize + self.r, self.r)
    }

    pub fn vertices(&self) -> Vec<SimplexPoint> {
        (0..=self.r)
            .map(|i| {
                let mut c = vec![0; self.r + 1];
                c[i] = self.n as i64;
                SimplexPoint(c)
            })
            .collect()
    }

    /// Lexicographic rank of `p` among `lattice_points(self)`.
    pub fn index_of(&self, p: &SimplexPoint) -> Option<usize> {
        if p.0.len() != self.r + 1 || p.0.iter().any(|&c| c < 0) || p.level() != self.n as i64 {
            return None;
        }
        let mut rank = 0usize;
        let mut remaining = self.n as usize;
        let len = self.r + 1;
        for (pos, &c) in p.0.iter().enumerate().take(len - 1) {
            let slots_after = len - pos - 1;
            for v in 0..c as usize {
                rank += binomial(remaining - v + slots_after - 1, slots_after - 1);
            }
            remaining -= c as usize;
        }
        Some(rank)
    }
}

/// A lattice point of a dilated simplex, in barycentric integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexPoint(pub Vec<i64>);

impl SimplexPoint {
    pub fn level(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// Orbit-invariant key: coordinates sorted in decreasing order.
    pub fn orbit_key(&self) -> Vec<i64> {
        let mut k = self.0.clone();
        k.sort_unstable_by(|a, b| b.cmp(a));
        k
    }
}

/// Canonical order used when a construction needs to visit points one by
/// one: by coordinate multiset, then lexicographically.
pub fn canonical_point_order(a: &SimplexPoint, b: &SimplexPoint) -> std::cmp::Ordering {
    a.orbit_key().cmp(&b.orbit_key()).then_with(|| a.cmp(b))
}

/// A coordinate face `{ p : p_i = 0 for i not in support }`. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FaceSelector(Vec<usize>);

impl FaceSelector {
    pub fn new(support: impl IntoIterator<Item = usize>, r: usize) -> Result<Self> {
        let set: BTreeSet<usize> = support.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidInput("face support must be nonempty".into()));
        }
        if let Some(&bad) = set.iter().find(|&&i| i > r) {
            return Err(Error::InvalidInput(format!(
                "face coordinate {bad} out of range for r = {r}"
            )));
        }
        Ok(FaceSelector(set.into_iter().collect()))
    }

    pub fn support(&self) -> &[usize] {
        &self.0
    }

    /// Dimension `s` of the face (`|support| - 1`).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, p: &SimplexPoint) -> bool {
        p.0.iter()
            .enumerate()
            .all(|(i, &c)| c == 0 || self.0.binary_search(&i).is_ok())
    }

    /// Every face of `Δ^r` (all nonempty supports), smallest first.
    pub fn all_faces(r: usize) -> Vec<FaceSelector> {
        let mut out: Vec<FaceSelector> = (1u64..(1u64 << (r + 1)))
            .map(|mask| FaceSelector((0..=r).filter(|i| mask >> i & 1 == 1).collect()))
            .collect();
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

/// A permutation of `{0, ..., k-1}`; `images[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &i in &images {
            if i >= k || seen[i] {
                return Err(Error::InvalidInput(format!(
                    "{images:?} is not a permutation"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(k: usize) -> Self {
        Permutation((0..k).collect())
    }

    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (0..k).collect();
        v.swap(a, b);
        Permutation(v)
    }

    /// The cycle `0 -> 1 -> ... -> k-1 -> 0`.
    pub fn cycle(k: usize) -> Self {
        Permutation((0..k).map(|i| (i + 1) % k).collect())
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply_index(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// All permutations of `k` letters in lexicographic order of image tuples.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (0..k.saturating_sub(1))
                .rev()
                .find(|&i| cur[i] < cur[i + 1])
            else {
                break;
            };
            let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}

pub fn lattice_points(s: &DilatedSimplex) -> Vec<SimplexPoint> {
    let mut out = Vec::with_capacity(s.num_points());
    let mut cur = vec![0i64; s.r + 1];
    fill(&mut cur, 0, s.n as i64, &mut out);
    out
}

fn fill(cur: &mut Vec<i64>, pos: usize, remaining: i64, out: &mut Vec<SimplexPoint>) {
    if pos == cur.len() - 1 {
        cur[pos] = remaining;
        out.push(SimplexPoint(cur.clone()));
        return;
    }
    for v in 0..=remaining {
        cur[pos] = v;
        fill(cur, pos + 1, remaining - v, out);
    }
}

pub fn interior_points(s: &DilatedSimplex) -> Vec<SimplexPoint> {
    lattice_points(s)
        .into_iter()
        .filter(|p| p.0.iter().all(|&c| c >= 1))
        .collect()
}

/// Drop the coordinates outside the face support.
pub fn restrict_point(p: &SimplexPoint, f: &FaceSelector) -> Result<SimplexPoint> {
    if p.0.len() <= *f.support().last().unwrap() || !f.contains(p) {
        return Err(Error::NotOnFace(p.0.clone()));
    }
    Ok(SimplexPoint(f.support().iter().map(|&i| p.0[i]).collect()))
}

/// Inverse of [`restrict_point`]: embed a face point into the ambient simplex.
pub fn embed_point(p: &SimplexPoint, f: &FaceSelector, r: usize) -> SimplexPoint {
    let mut c = vec![0; r + 1];
    for (k, &i) in f.support().iter().enumerate() {
        c[i] = p.0[k];
    }
    SimplexPoint(c)
}

/// `(g·p)_{g(i)} = p_i`.
pub fn apply_symmetry(g: &Permutation, p: &SimplexPoint) -> Result<SimplexPoint> {
    if g.arity() != p.0.len() {
        return Err(Error::DimensionMismatch {
            expected: p.0.len(),
            actual: g.arity(),
        });
    }
    let mut out = vec![0; p.0.len()];
    for (i, &c) in p.0.iter().enumerate() {
        out[g.apply_index(i)] = c;
    }
    Ok(SimplexPoint(out))
}

/// Saturates at `usize::MAX`.
pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        match acc.checked_mul((n - i) as u128) {
            Some(x) => acc = x / (i as u128 + 1),
            None => return usize::MAX,
        }
    }
    usize::try_from(acc).unwrap_or(usize::MAX)
}
