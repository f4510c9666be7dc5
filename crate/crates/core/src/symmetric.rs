//! Symmetric unimodular refinements of `n·Δ^r`.
//!
//! The simplex is cut by the reflection hyperplanes `x_i = x_j` and by every
//! hyperplane through `r` affinely independent lattice points. Chambers of
//! the resulting arrangement inside the fundamental region
//! `x_0 >= x_1 >= ... >= x_r` are triangulated with all their lattice points
//! at level `m·n`, and the result is transported by the symmetric group.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::lattice::IntVector;
use crate::placing::triangulate_all_points;
use crate::simplex::{
    apply_symmetry, lattice_points, DilatedSimplex, FaceSelector, Permutation, SimplexPoint,
};
use crate::triangulation::{
    self, combinations, enumerate_unimodular, is_invariant_unchecked, refines_unchecked,
    restrict_to_face_unchecked, validate, RefinementCertificate, Triangulation,
};

/// A hyperplane `{x : <form, x> = 0}` of `R^{r+1}`, read on the simplex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalHyperplane {
    form: Vec<i64>,
}

impl RationalHyperplane {
    fn from_form(mut form: Vec<i64>) -> Option<Self> {
        let g = form.iter().fold(0i128, |g, &x| exact::gcd(g, x as i128)) as i64;
        if g == 0 {
            return None;
        }
        let first = *form.iter().find(|&&x| x != 0).unwrap();
        let s = if first < 0 { -g } else { g };
        form.iter_mut().for_each(|x| *x /= s);
        // constant forms meet the simplex nowhere
        if form.iter().all(|&x| x == form[0]) {
            return None;
        }
        Some(RationalHyperplane { form })
    }

    /// The hyperplane through `r` linearly independent points of `R^{r+1}`.
    pub fn through(points: &[&[i64]]) -> Option<Self> {
        let d = points.first()?.len();
        if points.len() + 1 != d {
            return None;
        }
        let cols: Vec<Vec<i64>> = (0..d)
            .map(|j| points.iter().map(|p| p[j]).collect())
            .collect();
        let refs: Vec<&[i64]> = cols.iter().map(|c| c.as_slice()).collect();
        let k = exact::kernel_line(&refs)?;
        Self::from_form(k.into_iter().map(|x| x as i64).collect())
    }

    /// `x_i = x_j`.
    pub fn reflection(r: usize, i: usize, j: usize) -> Self {
        let mut form = vec![0; r + 1];
        form[i] = 1;
        form[j] = -1;
        Self::from_form(form).unwrap()
    }

    pub fn coordinate(r: usize, i: usize) -> Self {
        let mut form = vec![0; r + 1];
        form[i] = 1;
        RationalHyperplane { form }
    }

    pub fn form(&self) -> &[i64] {
        &self.form
    }

    /// Primitive normal with coordinate sum zero; with [`Self::offset`]
    /// the hyperplane is `<normal, x> = offset` on barycentric points.
    pub fn normal(&self) -> IntVector {
        self.normal_and_offset().0
    }

    pub fn offset(&self) -> BigRational {
        self.normal_and_offset().1
    }

    fn normal_and_offset(&self) -> (IntVector, BigRational) {
        let k = self.form.len() as i64;
        let s: i64 = self.form.iter().sum();
        let raw: Vec<i64> = self.form.iter().map(|&a| k * a - s).collect();
        let g = raw.iter().fold(0i128, |g, &x| exact::gcd(g, x as i128)) as i64;
        let first = *raw.iter().find(|&&x| x != 0).unwrap();
        let g = if first < 0 { -g } else { g };
        let normal = IntVector::from_i64(&raw.iter().map(|x| x / g).collect::<Vec<_>>());
        let offset = BigRational::new(BigInt::from(-s), BigInt::from(g));
        (normal, offset)
    }

    /// Sign of `<form, p>`.
    pub fn side(&self, p: &[i64]) -> i64 {
        self.form
            .iter()
            .zip(p)
            .map(|(a, b)| a * b)
            .sum::<i64>()
            .signum()
    }

    fn is_coordinate(&self) -> bool {
        self.form.iter().filter(|&&x| x != 0).count() == 1
    }
}

pub fn reflection_hyperplanes(r: usize) -> Vec<RationalHyperplane> {
    let mut v = Vec::new();
    for i in 0..=r {
        for j in i + 1..=r {
            v.push(RationalHyperplane::reflection(r, i, j));
        }
    }
    v
}

/// Every hyperplane spanned by `r` affinely independent lattice points of
/// `n·Δ^r`, sorted and deduplicated.
pub fn spanning_arrangement(
    r: usize,
    n: u64,
    max_points: usize,
) -> Result<Vec<RationalHyperplane>> {
    let s = DilatedSimplex::new(r, n)?;
    if s.num_points() > max_points {
        return Err(Error::BoundExceeded {
            what: "lattice points for the spanning arrangement",
            limit: max_points,
            actual: s.num_points(),
        });
    }
    let pts = lattice_points(&s);
    let mut set = BTreeSet::new();
    if r == 0 {
        return Ok(Vec::new());
    }
    combinations(pts.len(), r, &mut |c| {
        let ps: Vec<&[i64]> = c.iter().map(|&i| pts[i].coords()).collect();
        if let Some(h) = RationalHyperplane::through(&ps) {
            set.insert(h);
        }
    });
    Ok(set.into_iter().collect())
}

/// Least common multiple of the denominators (relative to level `n`) of
/// all arrangement vertices inside the simplex.
pub fn common_denominator(
    r: usize,
    n: u64,
    arr: &[RationalHyperplane],
    refl: &[RationalHyperplane],
) -> u64 {
    let mut hs: BTreeSet<RationalHyperplane> = arr.iter().chain(refl).cloned().collect();
    hs.extend((0..=r).map(|i| RationalHyperplane::coordinate(r, i)));
    let hs: Vec<_> = hs.into_iter().collect();
    let mut m = 1u64;
    if r == 0 {
        return m;
    }
    combinations(hs.len(), r, &mut |c| {
        let cols: Vec<Vec<i64>> = (0..=r)
            .map(|j| c.iter().map(|&h| hs[h].form[j]).collect())
            .collect();
        let refs: Vec<&[i64]> = cols.iter().map(|c| c.as_slice()).collect();
        let Some(mut z) = exact::kernel_line(&refs) else {
            return;
        };
        if z.iter().all(|&x| x <= 0) {
            z.iter_mut().for_each(|x| *x = -*x);
        }
        if z.iter().any(|&x| x < 0) {
            return;
        }
        let total: i128 = z.iter().sum();
        let den = total / exact::gcd(total, n as i128);
        m = exact::lcm(m, den as u64);
    });
    m
}

/// A closed chamber: primitive integer rays of its vertices and the
/// homogeneous inequalities `<c, x> >= 0` cutting it out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chamber {
    vertices: Vec<Vec<i64>>,
    constraints: Vec<Vec<i64>>,
}

impl Chamber {
    pub fn vertex_rays(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    /// Vertices in exact barycentric coordinates (summing to 1).
    pub fn barycentric_vertices(&self) -> Vec<Vec<BigRational>> {
        self.vertices
            .iter()
            .map(|v| {
                let s: i64 = v.iter().sum();
                v.iter()
                    .map(|&x| BigRational::new(x.into(), s.into()))
                    .collect()
            })
            .collect()
    }

    /// Closed containment of a point at any level.
    pub fn contains(&self, p: &[i64]) -> bool {
        self.constraints
            .iter()
            .all(|c| c.iter().zip(p).map(|(a, b)| a * b).sum::<i64>() >= 0)
    }

    /// Lies in `x_0 >= x_1 >= ... >= x_r`.
    pub fn is_fundamental(&self) -> bool {
        self.vertices
            .iter()
            .all(|v| v.windows(2).all(|w| w[0] >= w[1]))
    }

    /// Vertices as lattice points at `level`, when all are integral there.
    pub fn vertices_at_level(&self, level: u64) -> Option<Vec<SimplexPoint>> {
        self.vertices
            .iter()
            .map(|v| {
                let s: i64 = v.iter().sum();
                let l = level as i64;
                v.iter()
                    .map(|&x| {
                        if (x * l) % s == 0 {
                            Some(x * l / s)
                        } else {
                            None
                        }
                    })
                    .collect::<Option<Vec<_>>>()
                    .map(SimplexPoint)
            })
            .collect()
    }

    /// Normalized volume inside `n·Δ^r`.
    pub fn volume(&self, n: u64) -> BigRational {
        let r = self.vertices[0].len() - 1;
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut total = BigRational::zero();
        for simplex in self.pull(&all, r) {
            let cols: Vec<&[i64]> = simplex
                .iter()
                .map(|&i| self.vertices[i].as_slice())
                .collect();
            let det = exact::det_cols(&cols).abs();
            let sums: BigInt = simplex
                .iter()
                .map(|&i| BigInt::from(self.vertices[i].iter().sum::<i64>()))
                .product();
            let scale = BigInt::from(n).pow(r as u32);
            total += BigRational::new(scale * BigInt::from(det), sums);
        }
        total
    }

    fn tight(&self, c: &[i64], v: usize) -> bool {
        c.iter()
            .zip(&self.vertices[v])
            .map(|(a, b)| a * b)
            .sum::<i64>()
            == 0
    }

    fn rank_of(&self, vs: &[usize]) -> usize {
        let rows: Vec<Vec<i128>> = vs
            .iter()
            .map(|&v| exact::to_i128(&self.vertices[v]))
            .collect();
        exact::rank(&rows)
    }

    /// Pulling triangulation of a face (given by its vertices, affine
    /// dimension `dim`) from its first vertex.
    fn pull(&self, face: &[usize], dim: usize) -> Vec<Vec<usize>> {
        if dim == 0 {
            return vec![vec![face[0]]];
        }
        let apex = face[0];
        let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &self.constraints {
            let sub: Vec<usize> = face.iter().copied().filter(|&v| self.tight(c, v)).collect();
            if sub.len() < face.len() && !sub.contains(&apex) && self.rank_of(&sub) == dim {
                facets.insert(sub);
            }
        }
        let mut out = Vec::new();
        for f in facets {
            for mut s in self.pull(&f, dim - 1) {
                s.push(apex);
                out.push(s);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct ChamberComplex {
    pub r: usize,
    pub n: u64,
    pub m: u64,
    pub chambers: Vec<Chamber>,
    /// Pairs of chambers sharing a facet.
    pub adjacency: Vec<(usize, usize)>,
}

/// Chambers cut out of `n·Δ^r` by the reflection and spanning arrangements.
pub fn chamber_decomposition(
    r: usize,
    n: u64,
    m: u64,
    max_points: usize,
) -> Result<ChamberComplex> {
    let mut cuts = reflection_hyperplanes(r);
    cuts.extend(
        spanning_arrangement(r, n, max_points)?
            .into_iter()
            .filter(|h| !h.is_coordinate()),
    );
    let mut cells = vec![Chamber {
        vertices: (0..=r)
            .map(|i| {
                let mut v = vec![0; r + 1];
                v[i] = 1;
                v
            })
            .collect(),
        constraints: (0..=r)
            .map(|i| RationalHyperplane::coordinate(r, i).form)
            .collect(),
    }];
    for h in &cuts {
        let mut next = Vec::with_capacity(cells.len());
        for c in cells {
            match cut(&c, &h.form, r) {
                Some((a, b)) => {
                    next.push(a);
                    next.push(b);
                }
                None => next.push(c),
            }
        }
        cells = next;
    }
    cells.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    let mut adjacency = Vec::new();
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let shared: Vec<&Vec<i64>> = cells[i]
                .vertices
                .iter()
                .filter(|v| cells[j].vertices.contains(v))
                .collect();
            let rows: Vec<Vec<i128>> = shared.iter().map(|v| exact::to_i128(v)).collect();
            if exact::rank(&rows) == r {
                adjacency.push((i, j));
            }
        }
    }
    Ok(ChamberComplex {
        r,
        n,
        m,
        chambers: cells,
        adjacency,
    })
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive(v: Vec<i128>) -> Vec<i64> {
    let g = v.iter().fold(0i128, |g, &x| exact::gcd(g, x));
    v.into_iter().map(|x| (x / g) as i64).collect()
}

fn cut(c: &Chamber, form: &[i64], r: usize) -> Option<(Chamber, Chamber)> {
    let s: Vec<i64> = c.vertices.iter().map(|v| dot(form, v)).collect();
    if !(s.iter().any(|&x| x > 0) && s.iter().any(|&x| x < 0)) {
        return None;
    }
    let mut fresh = Vec::new();
    for (i, u) in c.vertices.iter().enumerate() {
        for (j, w) in c.vertices.iter().enumerate() {
            if !(s[i] > 0 && s[j] < 0) {
                continue;
            }
            let common: Vec<Vec<i128>> = c
                .constraints
                .iter()
                .filter(|k| dot(k, u) == 0 && dot(k, w) == 0)
                .map(|k| exact::to_i128(k))
                .collect();
            if exact::rank(&common) + 1 != r {
                continue;
            }
            let z: Vec<i128> = u
                .iter()
                .zip(w)
                .map(|(&a, &b)| s[i] as i128 * b as i128 - s[j] as i128 * a as i128)
                .collect();
            fresh.push(primitive(z));
        }
    }
    let side = |sign: i64| {
        let mut vertices: Vec<Vec<i64>> = c
            .vertices
            .iter()
            .zip(&s)
            .filter(|(_, &x)| x * sign >= 0)
            .map(|(v, _)| v.clone())
            .chain(fresh.iter().cloned())
            .collect();
        vertices.sort();
        vertices.dedup();
        let mut constraints = c.constraints.clone();
        constraints.push(form.iter().map(|x| x * sign).collect());
        // drop constraints that no longer support a facet
        constraints.retain(|k| {
            let t: Vec<Vec<i128>> = vertices
                .iter()
                .filter(|v| dot(k, v) == 0)
                .map(|v| exact::to_i128(v))
                .collect();
            exact::rank(&t) == r
        });
        Chamber {
            vertices,
            constraints,
        }
    };
    Some((side(1), side(-1)))
}

#[derive(Clone, Debug)]
pub struct SymmetricOptions {
    /// Cap on lattice points for exhaustive enumeration and arrangements.
    pub max_points: usize,
    /// Dilation retries (`m`, `2m`, ..., `max_retry·m`).
    pub max_retry: usize,
    /// Cap on lattice points of the refined simplex.
    pub max_level_points: usize,
}

impl Default for SymmetricOptions {
    fn default() -> Self {
        SymmetricOptions {
            max_points: triangulation::DEFAULT_MAX_POINTS,
            max_retry: 8,
            max_level_points: 50_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceCertificate {
    pub face: FaceSelector,
    pub unimodular: bool,
    pub invariant: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetricCertificates {
    pub unimodular: bool,
    pub invariant: bool,
    /// One per enumerated unimodular triangulation of `n·Δ^r`, in
    /// enumeration order; empty when enumeration was out of bounds.
    pub refinements: Vec<RefinementCertificate>,
    /// Every cell lies in a chamber of the arrangement (when one was built).
    pub chamber_cover: Option<bool>,
    pub faces: Vec<FaceCertificate>,
}

impl SymmetricCertificates {
    pub fn all_hold(&self) -> bool {
        self.unimodular
            && self.invariant
            && self.chamber_cover != Some(false)
            && self.faces.iter().all(|f| f.unimodular && f.invariant)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetricRefinementResult {
    pub r: usize,
    pub n: u64,
    pub m: u64,
    pub level: u64,
    pub triangulation: Triangulation,
    pub certificates: SymmetricCertificates,
    pub provenance: Vec<String>,
}

/// A unimodular `S_{r+1}`-invariant triangulation of `m·n·Δ^r` refining
/// every unimodular triangulation of `n·Δ^r`.
pub fn symmetric_unimodular_refinement(
    r: usize,
    n: u64,
    opts: &SymmetricOptions,
) -> Result<SymmetricRefinementResult> {
    let simplex = DilatedSimplex::new(r, n)?;
    if r > 3 {
        return Err(Error::Unsupported(r));
    }
    let mut provenance = Vec::new();
    let small = simplex.num_points() <= opts.max_points;
    if r <= 1 || n == 1 {
        let t = if r <= 1 {
            standard_segment(r, n)?
        } else {
            Triangulation::single_cell(r, 1)?
        };
        let enumerated = if small {
            Some(enumerate_unimodular(r, n, opts.max_points)?)
        } else {
            None
        };
        return Ok(unique_result(r, n, t, enumerated.as_deref(), provenance));
    }
    if !small {
        return Err(Error::BoundExceeded {
            what: "lattice points for symmetric refinement",
            limit: opts.max_points,
            actual: simplex.num_points(),
        });
    }

    let arr = spanning_arrangement(r, n, opts.max_points)?;
    let refl = reflection_hyperplanes(r);
    let m0 = common_denominator(r, n, &arr, &refl);
    provenance.push(format!(
        "{} spanning and {} reflection hyperplanes, denominator {m0}",
        arr.len(),
        refl.len()
    ));
    let level_points = |m: u64| {
        m.checked_mul(n)
            .and_then(|level| DilatedSimplex::new(r, level).ok())
            .map_or(usize::MAX, |s| s.num_points())
    };
    if level_points(m0) > opts.max_level_points {
        return Err(Error::BoundExceeded {
            what: "lattice points of the refined simplex",
            limit: opts.max_level_points,
            actual: level_points(m0),
        });
    }
    let all = enumerate_unimodular(r, n, opts.max_points)?;
    if all.len() == 1 {
        let t = all[0].clone();
        return Ok(unique_result(r, n, t, Some(&all), provenance));
    }
    let enumerated = Some(all);
    let complex = chamber_decomposition(r, n, m0, opts.max_points)?;
    let fundamental: Vec<&Chamber> = complex
        .chambers
        .iter()
        .filter(|c| c.is_fundamental())
        .collect();
    provenance.push(format!(
        "{} chambers, {} in the fundamental region",
        complex.chambers.len(),
        fundamental.len()
    ));

    let mut last_reason = String::new();
    let mut last_level = n;
    for attempt in 1..=opts.max_retry.max(1) {
        let m = m0 * attempt as u64;
        if level_points(m) > opts.max_level_points {
            return Err(Error::BoundExceeded {
                what: "lattice points of the refined simplex",
                limit: opts.max_level_points,
                actual: level_points(m),
            });
        }
        let level = m * n;
        last_level = level;
        let target = DilatedSimplex::new(r, level)?;
        match triangulate_by_chambers(target, &fundamental) {
            Ok((t, log)) => {
                provenance.extend(log);
                let certificates = certify(&t, enumerated.as_deref(), Some(&complex));
                if certificates.all_hold()
                    && certificates.refinements.len() == enumerated.as_ref().map_or(0, |e| e.len())
                {
                    provenance.push(format!("attempt {attempt}: certified at level {level}"));
                    return Ok(SymmetricRefinementResult {
                        r,
                        n,
                        m,
                        level,
                        triangulation: t,
                        certificates,
                        provenance,
                    });
                }
                last_reason = "certificates failed".to_string();
            }
            Err(reason) => last_reason = reason,
        }
        provenance.push(format!("attempt {attempt} at level {level}: {last_reason}"));
    }
    Err(Error::DilationBoundExceeded {
        attempts: opts.max_retry.max(1),
        last_level,
        reason: last_reason,
    })
}

fn unique_result(
    r: usize,
    n: u64,
    t: Triangulation,
    enumerated: Option<&[Triangulation]>,
    mut provenance: Vec<String>,
) -> SymmetricRefinementResult {
    provenance.push("unique unimodular triangulation; no dilation needed".to_string());
    let certificates = certify(&t, enumerated, None);
    SymmetricRefinementResult {
        r,
        n,
        m: 1,
        level: n,
        triangulation: t,
        certificates,
        provenance,
    }
}

fn standard_segment(r: usize, n: u64) -> Result<Triangulation> {
    if r == 0 {
        return Triangulation::new(0, n, vec![vec![0]]);
    }
    Triangulation::new(1, n, (0..n as usize).map(|i| vec![i, i + 1]).collect())
}

fn certify(
    t: &Triangulation,
    enumerated: Option<&[Triangulation]>,
    complex: Option<&ChamberComplex>,
) -> SymmetricCertificates {
    let valid = validate(t).is_valid();
    let unimodular = valid && (0..t.cells().len()).all(|c| t.cell_volume(c) == 1);
    let invariant = valid && is_invariant_unchecked(t);
    let refinements = if valid {
        enumerated
            .unwrap_or(&[])
            .iter()
            .map_while(|coarse| refines_unchecked(t, coarse).ok())
            .collect()
    } else {
        Vec::new()
    };
    let chamber_cover = complex.map(|cx| {
        (0..t.cells().len()).all(|c| {
            let cell = t.cell_points(c);
            cx.chambers
                .iter()
                .any(|ch| cell.iter().all(|p| ch.contains(p)))
        })
    });
    let faces = FaceSelector::all_faces(t.r())
        .into_iter()
        .filter(|f| f.dim() < t.r())
        .map(|face| match restrict_to_face_unchecked(t, &face) {
            Ok(sub) => {
                let ok = validate(&sub).is_valid();
                FaceCertificate {
                    unimodular: ok && (0..sub.cells().len()).all(|c| sub.cell_volume(c) == 1),
                    invariant: ok && is_invariant_unchecked(&sub),
                    face,
                }
            }
            Err(_) => FaceCertificate {
                face,
                unimodular: false,
                invariant: false,
            },
        })
        .collect();
    SymmetricCertificates {
        unimodular,
        invariant,
        refinements,
        chamber_cover,
        faces,
    }
}

fn triangulate_by_chambers(
    target: DilatedSimplex,
    fundamental: &[&Chamber],
) -> std::result::Result<(Triangulation, Vec<String>), String> {
    let level = target.n;
    let pts = lattice_points(&target);
    let mut order: Vec<&SimplexPoint> = pts
        .iter()
        .filter(|p| p.coords().windows(2).all(|w| w[0] >= w[1]))
        .collect();
    order.sort_by(|a, b| crate::simplex::canonical_point_order(a, b));
    let mut log = Vec::new();
    let mut cells: BTreeSet<Vec<usize>> = BTreeSet::new();
    let group = Permutation::all(target.r + 1);
    for (ci, ch) in fundamental.iter().enumerate() {
        if ch.vertices_at_level(level).is_none() {
            return Err(format!(
                "chamber {ci} has vertices off the level-{level} lattice"
            ));
        }
        let local: Vec<Vec<i64>> = order
            .iter()
            .filter(|p| ch.contains(p.coords()))
            .map(|p| p.0.clone())
            .collect();
        let Some(tri) = triangulate_all_points(&local) else {
            return Err(format!("chamber {ci} is degenerate"));
        };
        log.push(format!(
            "chamber {ci}: {} lattice points, {} cells",
            local.len(),
            tri.len()
        ));
        for cell in tri {
            for g in &group {
                let mut img: Vec<usize> = cell
                    .iter()
                    .map(|&i| {
                        let q = apply_symmetry(g, &SimplexPoint(local[i].clone())).unwrap();
                        target.index_of(&q).unwrap()
                    })
                    .collect();
                img.sort_unstable();
                cells.insert(img);
            }
        }
    }
    let t = Triangulation::new(target.r, level, cells.into_iter().collect())
        .map_err(|e| e.to_string())?;
    let report = validate(&t);
    if !report.is_valid() {
        return Err(format!(
            "transported chamber triangulations do not fit together ({} violations)",
            report.violations.len()
        ));
    }
    Ok((t, log))
}

/// Refine an invariant unimodular triangulation at level `n` to level `d·n`
/// by cutting every dilated cell along its barycentric grid `λ_i ∈ Z`.
///
/// The grid triangulation of `d·Δ^r` is symmetric for `r <= 2`; for `r = 3`
/// the grid leaves octahedra whose diagonals cannot be chosen invariantly.
pub fn equivariant_dilation_refinement(t: &Triangulation, d: u64) -> Result<Triangulation> {
    let report = validate(t);
    if !report.is_valid() {
        return Err(Error::InvalidTriangulation(format!(
            "{} violations",
            report.violations.len()
        )));
    }
    if !(0..t.cells().len()).all(|c| t.cell_volume(c) == 1) {
        return Err(Error::InvalidTriangulation(
            "input is not unimodular".into(),
        ));
    }
    if !is_invariant_unchecked(t) {
        return Err(Error::NonInvariant);
    }
    if d == 0 {
        return Err(Error::InvalidInput(
            "dilation factor must be positive".into(),
        ));
    }
    if d == 1 {
        return Ok(t.clone());
    }
    let r = t.r();
    if r >= 3 {
        return Err(Error::DilationBoundExceeded {
            attempts: 1,
            last_level: t.n() * d,
            reason:
                "grid subdivision of a dilated 3-simplex has octahedra with no invariant diagonal"
                    .into(),
        });
    }
    let target = DilatedSimplex::new(r, t.n() * d)?;
    let pattern = grid_cells(r, d);
    let mut cells: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in 0..t.cells().len() {
        let verts = t.cell_points(c);
        for lambdas in &pattern {
            let mut cell: Vec<usize> = lambdas
                .iter()
                .map(|lam| {
                    let p: Vec<i64> = (0..=r)
                        .map(|k| lam.iter().zip(&verts).map(|(l, v)| l * v[k]).sum())
                        .collect();
                    target
                        .index_of(&SimplexPoint(p))
                        .expect("grid point in simplex")
                })
                .collect();
            cell.sort_unstable();
            cells.insert(cell);
        }
    }
    Triangulation::new(r, target.n, cells.into_iter().collect())
}

/// Unit cells of `d·Δ^r` (r <= 2) cut by the hyperplanes `λ_i = k`, as
/// barycentric lattice points.
fn grid_cells(r: usize, d: u64) -> Vec<Vec<Vec<i64>>> {
    let d = d as i64;
    let e = |i: usize| {
        let mut v = vec![0i64; r + 1];
        v[i] = 1;
        v
    };
    let add = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<i64>>();
    let level = |k: i64| match k {
        0 => vec![SimplexPoint(vec![0; r + 1])],
        _ => lattice_points(&DilatedSimplex::new(r, k as u64).unwrap()),
    };
    let mut out = Vec::new();
    for base in level(d - 1) {
        out.push((0..=r).map(|i| add(base.coords(), &e(i))).collect());
    }
    if r == 2 && d >= 2 {
        for base in level(d - 2) {
            let b = base.coords();
            out.push(vec![
                add(&add(b, &e(0)), &e(1)),
                add(&add(b, &e(0)), &e(2)),
                add(&add(b, &e(1)), &e(2)),
            ]);
        }
    }
    out
}
