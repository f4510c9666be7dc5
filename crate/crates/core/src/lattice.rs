//! Exact integer-lattice algebra.
//!
//! Everything here works over arbitrary-precision integers: integer vectors
//! and matrices, Smith normal form with unimodular transforms, primitivity
//! and sublattice indices, and the congruence lattices
//! `L_n = { a in Z^d : a_1 + ... + a_d = 0 mod n }`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A vector of exact integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("vector must have length >= 1".into()));
        }
        Ok(IntVector(entries))
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn sum(&self) -> BigInt {
        self.0.iter().sum()
    }

    /// Gcd of the entries (zero for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.0.iter().map(|x| x.to_i64()).collect()
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Dense rectangular integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(Error::InvalidInput(
                "matrix must have at least one row".into(),
            ));
        }
        let ncols = rows[0].len();
        if ncols == 0 {
            return Err(Error::InvalidInput(
                "matrix must have at least one column".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidInput(
                "matrix rows have unequal lengths".into(),
            ));
        }
        Ok(IntMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = BigInt::from(e);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Determinant of a square matrix (fraction-free Bareiss elimination).
    pub fn det(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::RankDeficient {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += k * row[source]
    fn add_row(&mut self, target: usize, source: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(source, j)] * k;
            self[(target, j)] += v;
        }
    }

    /// col[target] += k * col[source]
    fn add_col(&mut self, target: usize, source: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, source)] * k;
            self[(i, target)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

// Matrices travel as arrays of arrays of decimal strings.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows: Vec<Vec<serde_json::Value>> = Vec::deserialize(d)?;
        let parsed = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => s
                            .parse::<BigInt>()
                            .map_err(|e| D::Error::custom(format!("bad integer {s:?}: {e}"))),
                        serde_json::Value::Number(n) => n
                            .to_string()
                            .parse::<BigInt>()
                            .map_err(|e| D::Error::custom(format!("bad integer {n}: {e}"))),
                        other => Err(D::Error::custom(format!("expected integer, got {other}"))),
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        IntMatrix::from_rows(parsed).map_err(D::Error::custom)
    }
}

/// Result of [`smith_normal_form`]: `u * a * v == d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    #[serde(serialize_with = "ser_bigints")]
    pub divisors: Vec<BigInt>,
}

fn ser_bigints<S: Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .serialize(s)
}

/// Smith normal form by elementary row and column operations.
///
/// The pivot is always the entry of least nonzero absolute value in the
/// remaining block, first in row-major order on ties, so the transforms are
/// reproducible. Divisors are nonnegative and form a divisibility chain;
/// trailing zeros mark rank deficiency.
pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        while let Some((pi, pj)) = min_pivot(&d, t) {
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = d[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&d[(i, t)] / &p);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&d[(t, j)] / &p);
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // Pivot must divide the remaining block; otherwise pull the
            // offending row up and reduce again.
            let offender = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&p));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }

    let divisors = (0..m.min(n)).map(|i| d[(i, i)].clone()).collect();
    SnfDecomposition { u, d, v, divisors }
}

fn min_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in t..d.nrows() {
        for j in t..d.ncols() {
            let x = d[(i, j)].abs();
            if x.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, b)| x < *b) {
                best = Some(((i, j), x));
            }
        }
    }
    best.map(|(pos, _)| pos)
}

/// `L_n` inside `Z^ambient_dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CongruenceLattice {
    #[serde(rename = "dim")]
    pub ambient_dim: usize,
    #[serde(rename = "mod")]
    pub modulus: u64,
}

impl CongruenceLattice {
    pub fn new(ambient_dim: usize, modulus: u64) -> Result<Self> {
        if ambient_dim == 0 || modulus == 0 {
            return Err(Error::InvalidInput(
                "congruence lattice needs dim >= 1 and modulus >= 1".into(),
            ));
        }
        Ok(CongruenceLattice {
            ambient_dim,
            modulus,
        })
    }

    pub fn full(ambient_dim: usize) -> Self {
        CongruenceLattice {
            ambient_dim,
            modulus: 1,
        }
    }

    pub fn contains(&self, v: &IntVector) -> bool {
        v.len() == self.ambient_dim && v.sum().mod_floor(&BigInt::from(self.modulus)).is_zero()
    }

    pub fn basis(&self) -> IntMatrix {
        congruence_basis(self.ambient_dim, self.modulus)
    }
}

/// A full-rank lattice, either by congruence data or by an explicit basis
/// (rows are basis vectors).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lattice {
    Congruence(CongruenceLattice),
    Basis(IntMatrix),
}

impl Lattice {
    pub fn basis_matrix(&self) -> IntMatrix {
        match self {
            Lattice::Congruence(c) => c.basis(),
            Lattice::Basis(b) => b.clone(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Lattice::Congruence(c) => c.ambient_dim,
            Lattice::Basis(b) => b.ncols(),
        }
    }

    /// Integer coordinates of `v` in this lattice's basis, if `v` is a member.
    pub fn coordinates(&self, v: &IntVector) -> Result<Option<Vec<BigInt>>> {
        let b = self.basis_matrix();
        check_full_rank(&b)?;
        if v.len() != b.ncols() {
            return Err(Error::DimensionMismatch {
                expected: b.ncols(),
                actual: v.len(),
            });
        }
        Ok(solve_left_integral(&b, &v.0))
    }

    pub fn contains(&self, v: &IntVector) -> Result<bool> {
        match self {
            Lattice::Congruence(c) => {
                if v.len() != c.ambient_dim {
                    return Err(Error::DimensionMismatch {
                        expected: c.ambient_dim,
                        actual: v.len(),
                    });
                }
                Ok(c.contains(v))
            }
            Lattice::Basis(_) => Ok(self.coordinates(v)?.is_some()),
        }
    }
}

impl From<CongruenceLattice> for Lattice {
    fn from(c: CongruenceLattice) -> Self {
        Lattice::Congruence(c)
    }
}

fn check_full_rank(b: &IntMatrix) -> Result<()> {
    if b.nrows() != b.ncols() || b.det()?.is_zero() {
        return Err(Error::RankDeficient {
            rows: b.nrows(),
            cols: b.ncols(),
        });
    }
    Ok(())
}

/// Solve `x * b = target` for a square nonsingular `b`; `None` unless `x` is integral.
fn solve_left_integral(b: &IntMatrix, target: &[BigInt]) -> Option<Vec<BigInt>> {
    // x * b = t  <=>  b^T x^T = t^T
    let bt = b.transpose();
    let x = solve_rational(&bt, target)?;
    x.into_iter()
        .map(|q| q.is_integer().then(|| q.to_integer()))
        .collect()
}

/// Solve `a x = rhs` over the rationals for square nonsingular `a`.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve_rational(a: &IntMatrix, rhs: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = a.nrows();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = a
                .row(i)
                .iter()
                .map(|x| BigRational::from(x.clone()))
                .collect();
            row.push(BigRational::from(rhs[i].clone()));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=n {
                    let v = &f * &m[c][j];
                    m[i][j] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// True iff `v` is primitive in `lattice`: no `k >= 2` has `v / k` in the lattice.
pub fn is_primitive(v: &IntVector, lattice: &Lattice) -> Result<bool> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    match lattice {
        Lattice::Congruence(c) => {
            if !lattice.contains(v)? {
                return Err(Error::NotInLattice);
            }
            let g = v.content();
            let modulus = BigInt::from(c.modulus);
            let s = v.sum();
            // v/k is integral iff k | g; it is then in L_n iff n | sum/k.
            let mut k = BigInt::from(2);
            while k <= g {
                if g.is_multiple_of(&k) && (&s / &k).mod_floor(&modulus).is_zero() {
                    return Ok(false);
                }
                k += 1;
            }
            Ok(true)
        }
        Lattice::Basis(_) => {
            let coords = lattice.coordinates(v)?.ok_or(Error::NotInLattice)?;
            let g = coords.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            Ok(g.is_one())
        }
    }
}

/// `[sup : sub]` as the product of the Smith divisors of the inclusion matrix.
pub fn lattice_index(sub: &Lattice, sup: &Lattice) -> Result<BigInt> {
    let bs = sub.basis_matrix();
    let bp = sup.basis_matrix();
    check_full_rank(&bs)?;
    check_full_rank(&bp)?;
    if bs.ncols() != bp.ncols() {
        return Err(Error::DimensionMismatch {
            expected: bp.ncols(),
            actual: bs.ncols(),
        });
    }
    let rows = (0..bs.nrows())
        .map(|i| solve_left_integral(&bp, bs.row(i)).ok_or(Error::NotSublattice))
        .collect::<Result<Vec<_>>>()?;
    let inclusion = IntMatrix::from_rows(rows)?;
    let snf = smith_normal_form(&inclusion);
    Ok(snf.divisors.iter().product())
}

/// Basis (as rows) of `L_n` in `Z^d`: `e_i + (n-1) e_d` for `i < d`, then `n e_d`.
pub fn congruence_basis(d: usize, n: u64) -> IntMatrix {
    assert!(d >= 1 && n >= 1, "congruence_basis needs d >= 1 and n >= 1");
    let mut b = IntMatrix::zeros(d, d);
    for i in 0..d - 1 {
        b[(i, i)] = BigInt::one();
        b[(i, d - 1)] = BigInt::from(n - 1);
    }
    b[(d - 1, d - 1)] = BigInt::from(n);
    b
}
