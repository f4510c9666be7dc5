//! Simplicial fans in congruence lattices.
//!
//! Every fan here lives in the first orthant of `R^{r+1}` with lattice
//! `L_n`; rays are stored as their `L_n`-primitive generators.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{self, SimplexFrame};
use crate::lattice::{smith_normal_form, CongruenceLattice, IntMatrix, IntVector, Lattice};
use crate::placing::triangulate_all_points;
use crate::simplex::{lattice_points, DilatedSimplex, SimplexPoint};
use crate::triangulation::{validate, Triangulation};

/// The `L`-primitive generator of the ray through a nonzero integer vector.
pub fn primitive_generator(v: &[i64], lattice: &CongruenceLattice) -> Result<Vec<i64>> {
    if v.len() != lattice.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: lattice.ambient_dim,
            actual: v.len(),
        });
    }
    let g = v.iter().fold(0i128, |g, &x| exact::gcd(g, x as i128)) as i64;
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    let p: Vec<i64> = v.iter().map(|x| x / g).collect();
    let n = lattice.modulus as i64;
    let s: i64 = p.iter().sum();
    let k = n / exact::gcd(n as i128, s as i128) as i64;
    Ok(p.iter().map(|x| x * k).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cone {
    generators: Vec<Vec<i64>>,
    lattice: CongruenceLattice,
}

impl Cone {
    /// Generators must be `L`-primitive; they are stored sorted.
    pub fn new(mut generators: Vec<Vec<i64>>, lattice: CongruenceLattice) -> Result<Self> {
        for g in &generators {
            if primitive_generator(g, &lattice)? != *g {
                return Err(Error::InvalidInput(format!(
                    "{g:?} is not a primitive vector of the lattice"
                )));
            }
        }
        generators.sort();
        generators.dedup();
        Ok(Cone {
            generators,
            lattice,
        })
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn lattice(&self) -> CongruenceLattice {
        self.lattice
    }

    fn frame(&self) -> Result<SimplexFrame> {
        if self.generators.len() != self.lattice.ambient_dim {
            return Err(Error::NotSimplicial(format!(
                "{} generators in dimension {}",
                self.generators.len(),
                self.lattice.ambient_dim
            )));
        }
        let cols: Vec<&[i64]> = self.generators.iter().map(|g| g.as_slice()).collect();
        SimplexFrame::new(&cols)
            .ok_or_else(|| Error::NotSimplicial("generators are linearly dependent".into()))
    }

    pub fn contains(&self, p: &[i64]) -> Result<bool> {
        Ok(self.frame()?.contains(p))
    }

    /// `|det G| / Π Σg`: the normalized volume of the slice `Σx = 1`.
    pub fn slice_volume(&self) -> BigRational {
        let cols: Vec<&[i64]> = self.generators.iter().map(|g| g.as_slice()).collect();
        let det = BigInt::from(exact::det_cols(&cols).abs());
        let den: BigInt = self
            .generators
            .iter()
            .map(|g| BigInt::from(g.iter().sum::<i64>()))
            .product();
        BigRational::new(det, den)
    }

    /// Smith divisors of the generators written in a basis of `L`.
    pub fn lattice_divisors(&self) -> Result<Vec<BigInt>> {
        let l = Lattice::from(self.lattice);
        let rows = self
            .generators
            .iter()
            .map(|g| {
                l.coordinates(&IntVector::from_i64(g))?
                    .ok_or(Error::NotInLattice)
            })
            .collect::<Result<Vec<_>>>()?;
        let snf = smith_normal_form(&IntMatrix::from_rows(rows)?);
        Ok(snf.divisors)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    lattice: CongruenceLattice,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl Fan {
    /// Rays are sorted and cones re-indexed; every ray must be `L`-primitive.
    pub fn new(
        lattice: CongruenceLattice,
        rays: Vec<Vec<i64>>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Self> {
        for r in &rays {
            if primitive_generator(r, &lattice)? != *r {
                return Err(Error::InvalidInput(format!(
                    "ray {r:?} is not a primitive vector of the lattice"
                )));
            }
        }
        let mut order: Vec<usize> = (0..rays.len()).collect();
        order.sort_by(|&a, &b| rays[a].cmp(&rays[b]));
        let mut new_index = vec![0; rays.len()];
        for (pos, &old) in order.iter().enumerate() {
            new_index[old] = pos;
        }
        let sorted: Vec<Vec<i64>> = order.iter().map(|&i| rays[i].clone()).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("duplicate rays".into()));
        }
        let mut cones = max_cones
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|i| {
                        new_index.get(i).copied().ok_or(Error::IndexOutOfRange {
                            index: i,
                            len: rays.len(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(|mut c| {
                        c.sort_unstable();
                        c
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        cones.sort();
        cones.dedup();
        Ok(Fan {
            lattice,
            rays: sorted,
            max_cones: cones,
        })
    }

    pub fn lattice(&self) -> CongruenceLattice {
        self.lattice
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn cone(&self, i: usize) -> Cone {
        Cone {
            generators: self.max_cones[i]
                .iter()
                .map(|&j| self.rays[j].clone())
                .collect(),
            lattice: self.lattice,
        }
    }

    pub fn cones(&self) -> Vec<Cone> {
        (0..self.max_cones.len()).map(|i| self.cone(i)).collect()
    }

    /// Index of the first maximal cone containing `p`.
    pub fn locate(&self, p: &[i64]) -> Result<Option<usize>> {
        for (i, c) in self.cones().iter().enumerate() {
            if c.contains(p)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Rays off the orthant boundary (all coordinates positive).
    pub fn interior_rays(&self) -> usize {
        self.rays
            .iter()
            .filter(|r| r.iter().all(|&x| x > 0))
            .count()
    }
}

#[derive(Serialize, Deserialize)]
struct FanJson {
    lattice: CongruenceLattice,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl Serialize for Fan {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FanJson {
            lattice: self.lattice,
            rays: self.rays.clone(),
            max_cones: self.max_cones.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fan {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FanJson::deserialize(d)?;
        Fan::new(raw.lattice, raw.rays, raw.max_cones).map_err(D::Error::custom)
    }
}

/// The first orthant of `R^{r+1}` in `L_n`.
pub fn orthant_fan(r: usize, n: u64) -> Result<Fan> {
    let lattice = CongruenceLattice::new(r + 1, n)?;
    let rays = (0..=r)
        .map(|i| {
            let mut e = vec![0; r + 1];
            e[i] = 1;
            primitive_generator(&e, &lattice)
        })
        .collect::<Result<Vec<_>>>()?;
    Fan::new(lattice, rays, vec![(0..=r).collect()])
}

/// One maximal cone per cell; the rays are the vertices at height `n`.
pub fn cone_over_triangulation(t: &Triangulation) -> Result<Fan> {
    let report = validate(t);
    if !report.is_valid() {
        return Err(Error::InvalidTriangulation(format!(
            "{} violations",
            report.violations.len()
        )));
    }
    let lattice = CongruenceLattice::new(t.r() + 1, t.n())?;
    let used = t.vertex_set();
    let index: BTreeMap<usize, usize> = used.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let rays = used
        .iter()
        .map(|&p| {
            let v = t.points()[p].0.clone();
            debug_assert_eq!(primitive_generator(&v, &lattice).unwrap(), v);
            v
        })
        .collect();
    let cones = t
        .cells()
        .iter()
        .map(|c| c.iter().map(|p| index[p]).collect())
        .collect();
    Fan::new(lattice, rays, cones)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeWitness {
    pub cone: usize,
    #[serde(serialize_with = "ints")]
    pub divisors: Vec<BigInt>,
    pub smooth: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothnessReport {
    pub smooth: bool,
    pub cones: Vec<ConeWitness>,
}

/// Every maximal cone's generators form a basis of `L` (all Smith divisors 1).
pub fn is_smooth(f: &Fan) -> Result<SmoothnessReport> {
    let cones = f
        .cones()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.frame()?;
            let divisors = c.lattice_divisors()?;
            let smooth = divisors.iter().all(|d| d.is_one());
            Ok(ConeWitness {
                cone: i,
                divisors,
                smooth,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SmoothnessReport {
        smooth: cones.iter().all(|c| c.smooth),
        cones,
    })
}

/// Checks that `f` is a simplicial subdivision of the first orthant:
/// proper facet pairing with the coordinate hyperplanes as boundary, and
/// slice volumes adding up to the whole simplex.
pub fn check_orthant_subdivision(f: &Fan) -> Result<()> {
    let d = f.lattice.ambient_dim;
    if f.rays.iter().any(|r| r.iter().any(|&x| x < 0)) {
        return Err(Error::NotASubdivision("a ray leaves the orthant".into()));
    }
    let mut facets: BTreeMap<Vec<usize>, Vec<i128>> = BTreeMap::new();
    let mut total = BigRational::zero();
    for (ci, cone) in f.max_cones.iter().enumerate() {
        let c = f.cone(ci);
        if c.frame().is_err() {
            return Err(Error::NotSimplicial(format!("cone {ci}")));
        }
        total += c.slice_volume();
        for skip in 0..cone.len() {
            let facet: Vec<usize> = cone
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &i)| i)
                .collect();
            let mut cols: Vec<&[i64]> = facet.iter().map(|&i| f.rays[i].as_slice()).collect();
            cols.push(&f.rays[cone[skip]]);
            facets
                .entry(facet)
                .or_default()
                .push(exact::det_cols(&cols).signum());
        }
    }
    for (facet, sides) in &facets {
        let boundary = (0..d).any(|k| facet.iter().all(|&i| f.rays[i][k] == 0));
        let ok = match sides.as_slice() {
            [_] => boundary,
            [a, b] => !boundary && a != b,
            _ => false,
        };
        if !ok {
            return Err(Error::NotASubdivision(format!(
                "facet {facet:?} is not properly shared"
            )));
        }
    }
    if total != BigRational::one() {
        return Err(Error::NotASubdivision(format!(
            "slice volume {total} differs from the orthant"
        )));
    }
    Ok(())
}

/// Every cone of `sub` lies in a cone of `base`, and both subdivide the orthant.
pub fn check_subdivides(sub: &Fan, base: &Fan) -> Result<()> {
    if sub.lattice != base.lattice {
        return Err(Error::NotASubdivision(
            "fans live in different lattices".into(),
        ));
    }
    check_orthant_subdivision(base)?;
    check_orthant_subdivision(sub)?;
    let base_cones = base.cones();
    for (i, c) in sub.cones().iter().enumerate() {
        let mut inside = false;
        for b in &base_cones {
            let frame = b.frame()?;
            if c.generators.iter().all(|g| frame.contains(g)) {
                inside = true;
                break;
            }
        }
        if !inside {
            return Err(Error::NotASubdivision(format!(
                "cone {i} lies in no cone of the base fan"
            )));
        }
    }
    Ok(())
}

/// Every ray of `sub` has its `L_n`-primitive generator on `Σx = n`.
pub fn is_crepant(sub: &Fan, base: &Fan) -> Result<bool> {
    check_subdivides(sub, base)?;
    let n = sub.lattice.modulus as i64;
    Ok(sub.rays.iter().all(|r| {
        debug_assert_eq!(primitive_generator(r, &sub.lattice).unwrap(), *r);
        r.iter().sum::<i64>() == n
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupInvariants {
    /// Elementary divisors greater than 1, in divisibility order.
    #[serde(serialize_with = "ints")]
    pub divisors: Vec<BigInt>,
    #[serde(serialize_with = "int")]
    pub order: BigInt,
}

impl GroupInvariants {
    pub fn is_cyclic(&self) -> bool {
        self.divisors.len() <= 1
    }
}

/// Cokernel of `f: N -> N'` (rows are images of a basis of `N`).
pub fn stacky_group_invariants(f: &IntMatrix) -> Result<GroupInvariants> {
    if f.nrows() != f.ncols() || f.det()?.is_zero() {
        return Err(Error::RankDeficient {
            rows: f.nrows(),
            cols: f.ncols(),
        });
    }
    let snf = smith_normal_form(f);
    let divisors: Vec<BigInt> = snf.divisors.into_iter().filter(|d| !d.is_one()).collect();
    let order = divisors.iter().product();
    Ok(GroupInvariants { divisors, order })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackyFan {
    pub fan: Fan,
    pub lattice_map: IntMatrix,
}

impl StackyFan {
    pub fn new(fan: Fan, lattice_map: IntMatrix) -> Result<Self> {
        if lattice_map.nrows() != fan.lattice.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: fan.lattice.ambient_dim,
                actual: lattice_map.nrows(),
            });
        }
        stacky_group_invariants(&lattice_map)?;
        Ok(StackyFan { fan, lattice_map })
    }

    /// The fan in `L_n` together with the inclusion `L_n ⊂ Z^{r+1}`,
    /// written in the standard basis of `L_n`.
    pub fn over_congruence(fan: Fan) -> Result<Self> {
        let b = fan.lattice.basis();
        Self::new(fan, b)
    }

    pub fn group(&self) -> GroupInvariants {
        stacky_group_invariants(&self.lattice_map).expect("checked at construction")
    }
}

impl Serialize for StackyFan {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            lattice: CongruenceLattice,
            rays: &'a [Vec<i64>],
            max_cones: &'a [Vec<usize>],
            lattice_map: Vec<Vec<serde_json::Value>>,
        }
        Out {
            lattice: self.fan.lattice,
            rays: &self.fan.rays,
            max_cones: &self.fan.max_cones,
            lattice_map: self
                .lattice_map
                .to_rows()
                .iter()
                .map(|row| row.iter().map(json_int).collect())
                .collect(),
        }
        .serialize(s)
    }
}

fn json_int(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => v.into(),
        None => x.to_string().into(),
    }
}

fn int<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    json_int(x).serialize(s)
}

fn ints<S: Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    xs.iter().map(json_int).collect::<Vec<_>>().serialize(s)
}

/// Star subdivision at a primitive vector of the support.
pub fn star_subdivision(f: &Fan, rho: &[i64]) -> Result<Fan> {
    let v = IntVector::from_i64(rho);
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    if !f.lattice.contains(&v) {
        return Err(Error::NotInLattice);
    }
    if primitive_generator(rho, &f.lattice)? != rho {
        return Err(Error::InvalidInput(format!(
            "{rho:?} is not primitive in the lattice"
        )));
    }
    let mut hits = Vec::new();
    for (i, c) in f.cones().iter().enumerate() {
        let frame = c.frame()?;
        if frame.contains(rho) {
            hits.push((i, frame.coords(rho)));
        }
    }
    if hits.is_empty() {
        return Err(Error::OutsideSupport);
    }
    if f.rays.iter().any(|r| r == rho) {
        return Ok(f.clone());
    }
    let mut rays = f.rays.clone();
    rays.push(rho.to_vec());
    let new = rays.len() - 1;
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for (i, cone) in f.max_cones.iter().enumerate() {
        match hits.iter().find(|h| h.0 == i) {
            None => cones.push(cone.clone()),
            Some((_, lambda)) => {
                // frame coordinates follow the sorted generator order of `cone`
                for (k, &l) in lambda.iter().enumerate() {
                    if l > 0 {
                        let mut c = cone.clone();
                        c[k] = new;
                        cones.push(c);
                    }
                }
            }
        }
    }
    Fan::new(f.lattice, rays, cones)
}

/// A cone sliced at `Σx = n`: a rational simplex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SliceCell {
    pub vertices: Vec<Vec<BigRational>>,
}

impl SliceCell {
    /// The vertices as lattice points, when all are integral.
    pub fn lattice_vertices(&self) -> Option<Vec<SimplexPoint>> {
        self.vertices
            .iter()
            .map(|v| {
                v.iter()
                    .map(|q| q.is_integer().then(|| q.to_integer().to_i64()).flatten())
                    .collect::<Option<Vec<_>>>()
                    .map(SimplexPoint)
            })
            .collect()
    }
}

impl Serialize for SliceCell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.vertices
            .iter()
            .map(|v| v.iter().map(|q| q.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

/// The rational subdivision of `n·Δ^r` cut out by the cones of `f`.
pub fn slice_to_subdivision(f: &Fan) -> Result<Vec<SliceCell>> {
    check_orthant_subdivision(f)?;
    let n = BigInt::from(f.lattice.modulus);
    let mut cells: Vec<SliceCell> = f
        .cones()
        .iter()
        .map(|c| {
            let mut vertices: Vec<Vec<BigRational>> = c
                .generators
                .iter()
                .map(|g| {
                    let s = BigInt::from(g.iter().sum::<i64>());
                    g.iter()
                        .map(|&x| BigRational::new(&n * BigInt::from(x), s.clone()))
                        .collect()
                })
                .collect();
            vertices.sort();
            SliceCell { vertices }
        })
        .collect();
    cells.sort();
    Ok(cells)
}

#[derive(Clone, Debug, Serialize)]
pub struct Domination {
    pub level: u64,
    pub triangulation: Triangulation,
    /// For each cell, the maximal cone of the fan containing its cone.
    pub cone_of_cell: Vec<usize>,
}

impl Domination {
    /// Re-check every cell against its assigned cone.
    pub fn verify(&self, f: &Fan) -> bool {
        let t = &self.triangulation;
        self.cone_of_cell.len() == t.cells().len()
            && self.cone_of_cell.iter().enumerate().all(|(c, &k)| {
                k < f.max_cones.len()
                    && t.cell_points(c)
                        .iter()
                        .all(|p| f.cone(k).contains(p).unwrap_or(false))
            })
    }
}

/// A unimodular triangulation at a level `n' = k·n` whose cones refine `f`.
///
/// `k` starts at the least common denominator of the slice vertices and
/// is multiplied by `2, 3, ...` up to `max_retry` when a try fails.
pub fn dominate_subdivision(
    f: &Fan,
    max_retry: usize,
    max_level_points: usize,
) -> Result<Domination> {
    let slices = slice_to_subdivision(f)?;
    let r = f.lattice.ambient_dim - 1;
    let n = f.lattice.modulus;
    let mut k0 = 1u64;
    for cell in &slices {
        for v in &cell.vertices {
            for q in v {
                k0 = exact::lcm(k0, q.denom().to_u64().expect("small denominator"));
            }
        }
    }
    let cones = f.cones();
    let frames = cones
        .iter()
        .map(|c| c.frame())
        .collect::<Result<Vec<_>>>()?;
    let mut last = String::new();
    for attempt in 1..=max_retry.max(1) {
        let level = n * k0 * attempt as u64;
        let target = DilatedSimplex::new(r, level)?;
        if target.num_points() > max_level_points {
            return Err(Error::BoundExceeded {
                what: "lattice points of the dominating simplex",
                limit: max_level_points,
                actual: target.num_points(),
            });
        }
        let pts = lattice_points(&target);
        let mut cells: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut ok = true;
        for frame in &frames {
            let local: Vec<usize> = (0..pts.len())
                .filter(|&i| frame.contains(pts[i].coords()))
                .collect();
            let coords: Vec<Vec<i64>> = local.iter().map(|&i| pts[i].0.clone()).collect();
            match triangulate_all_points(&coords) {
                Some(tri) => cells.extend(tri.into_iter().map(|c| {
                    let mut c: Vec<usize> = c.into_iter().map(|i| local[i]).collect();
                    c.sort_unstable();
                    c
                })),
                None => ok = false,
            }
        }
        if ok {
            let t = Triangulation::new(r, level, cells.into_iter().collect())?;
            let valid = validate(&t).is_valid();
            if valid && (0..t.cells().len()).all(|c| t.cell_volume(c) == 1) {
                let cone_of_cell = (0..t.cells().len())
                    .map(|c| {
                        let verts = t.cell_points(c);
                        frames
                            .iter()
                            .position(|fr| verts.iter().all(|p| fr.contains(p)))
                            .expect("cell built inside a cone")
                    })
                    .collect();
                return Ok(Domination {
                    level,
                    triangulation: t,
                    cone_of_cell,
                });
            }
            last = if valid {
                "cells are not unimodular".into()
            } else {
                "cone triangulations do not fit together".into()
            };
        } else {
            last = "a cone has no full-dimensional lattice points".into();
        }
    }
    Err(Error::DilationBoundExceeded {
        attempts: max_retry.max(1),
        last_level: n * k0 * max_retry.max(1) as u64,
        reason: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::{enumerate_unimodular, is_invariant};

    fn medial() -> Triangulation {
        enumerate_unimodular(2, 2, 35)
            .unwrap()
            .into_iter()
            .find(|t| is_invariant(t).unwrap())
            .unwrap()
    }

    #[test]
    fn orthant_rays() {
        assert_eq!(orthant_fan(1, 1).unwrap().rays(), &[vec![0, 1], vec![1, 0]]);
        assert_eq!(orthant_fan(1, 2).unwrap().rays(), &[vec![0, 2], vec![2, 0]]);
        let f = orthant_fan(2, 3).unwrap();
        assert_eq!(f.rays(), &[vec![0, 0, 3], vec![0, 3, 0], vec![3, 0, 0]]);
    }

    #[test]
    fn smoothness() {
        assert!(is_smooth(&orthant_fan(2, 1).unwrap()).unwrap().smooth);
        let a = is_smooth(&orthant_fan(1, 3).unwrap()).unwrap();
        assert!(!a.smooth);
        assert_eq!(a.cones[0].divisors, vec![BigInt::from(1), BigInt::from(3)]);
        let f = cone_over_triangulation(&medial()).unwrap();
        assert_eq!(f.max_cones().len(), 4);
        assert!(is_smooth(&f).unwrap().smooth);
    }

    #[test]
    fn crepancy() {
        let base = orthant_fan(2, 2).unwrap();
        let f = cone_over_triangulation(&medial()).unwrap();
        assert!(is_crepant(&f, &base).unwrap());
        assert!(is_crepant(&base, &base).unwrap());
        let o = orthant_fan(2, 1).unwrap();
        let star = star_subdivision(&o, &[1, 1, 1]).unwrap();
        assert!(!is_crepant(&star, &o).unwrap());
        // a fan that misses part of the orthant
        let partial = Fan::new(
            base.lattice(),
            f.rays().to_vec(),
            f.max_cones()[..3].to_vec(),
        )
        .unwrap();
        assert!(matches!(
            is_crepant(&partial, &base),
            Err(Error::NotASubdivision(_))
        ));
    }

    #[test]
    fn group_invariants() {
        let id = stacky_group_invariants(&IntMatrix::identity(3)).unwrap();
        assert!(id.divisors.is_empty());
        assert_eq!(id.order, BigInt::one());
        let g = stacky_group_invariants(&crate::lattice::congruence_basis(3, 5)).unwrap();
        assert_eq!(g.divisors, vec![BigInt::from(5)]);
        let g = stacky_group_invariants(&IntMatrix::diagonal(&[4, 4])).unwrap();
        assert_eq!(g.divisors, vec![BigInt::from(4), BigInt::from(4)]);
        assert_eq!(g.order, BigInt::from(16));
        assert!(matches!(
            stacky_group_invariants(&IntMatrix::diagonal(&[1, 0])),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn star_subdivisions() {
        let o = orthant_fan(2, 1).unwrap();
        let s = star_subdivision(&o, &[1, 1, 1]).unwrap();
        assert_eq!(s.max_cones().len(), 3);
        let vol: BigRational = s.cones().iter().map(|c| c.slice_volume()).sum();
        assert_eq!(vol, BigRational::one());
        assert_eq!(star_subdivision(&o, &[1, 0, 0]).unwrap(), o);
        assert_eq!(
            star_subdivision(&orthant_fan(1, 1).unwrap(), &[1, 1])
                .unwrap()
                .max_cones()
                .len(),
            2
        );
        assert!(matches!(
            star_subdivision(&o, &[1, -1, 0]),
            Err(Error::OutsideSupport)
        ));
    }

    #[test]
    fn slices() {
        let o = orthant_fan(2, 1).unwrap();
        let cells = slice_to_subdivision(&o).unwrap();
        assert_eq!(cells.len(), 1);
        let s = star_subdivision(&o, &[1, 1, 1]).unwrap();
        let cells = slice_to_subdivision(&s).unwrap();
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(cells.len(), 3);
        for c in &cells {
            assert!(c.vertices.contains(&vec![third.clone(); 3]));
        }
        let t = medial();
        let back = slice_to_subdivision(&cone_over_triangulation(&t).unwrap()).unwrap();
        let mut got: Vec<Vec<SimplexPoint>> =
            back.iter().map(|c| c.lattice_vertices().unwrap()).collect();
        got.sort();
        let mut want: Vec<Vec<SimplexPoint>> = (0..t.cells().len())
            .map(|c| {
                t.cells()[c]
                    .iter()
                    .map(|&i| t.points()[i].clone())
                    .collect()
            })
            .collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn domination() {
        let o = orthant_fan(2, 1).unwrap();
        let s = star_subdivision(&o, &[1, 1, 1]).unwrap();
        let d = dominate_subdivision(&s, 8, 50_000).unwrap();
        assert_eq!(d.level, 3);
        assert!(d.verify(&s));
        assert_eq!(d.triangulation.cells().len(), 9);
        let m = medial();
        let d = dominate_subdivision(&cone_over_triangulation(&m).unwrap(), 8, 50_000).unwrap();
        assert_eq!((d.level, &d.triangulation), (2, &m));
        let d = dominate_subdivision(&orthant_fan(2, 4).unwrap(), 8, 50_000).unwrap();
        assert_eq!(d.level, 4);
        assert_eq!(d.triangulation.cells().len(), 16);
    }

    #[test]
    fn fan_json() {
        let f = cone_over_triangulation(&medial()).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with(r#"{"lattice":{"dim":3,"mod":2},"rays":"#));
        let back: Fan = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let st = StackyFan::over_congruence(f).unwrap();
        assert_eq!(st.group().order, BigInt::from(2));
        let v = serde_json::to_value(&st).unwrap();
        assert_eq!(v["lattice_map"][2], serde_json::json!([0, 0, 2]));
    }
}
