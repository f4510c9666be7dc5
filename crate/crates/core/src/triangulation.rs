//! Lattice triangulations of `n·Δ^r`.
//!
//! Cells are sorted tuples of point indices into [`lattice_points`]. A cell
//! with vertex matrix `V` (columns are the points, all at level `n`) has
//! normalized volume `|det V| / n`, so a triangulation is certified by
//! facet pairing plus `Σ vol = n^r`.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, SimplexFrame};
use crate::simplex::{
    apply_symmetry, lattice_points, restrict_point, DilatedSimplex, FaceSelector, Permutation,
    SimplexPoint,
};

/// Default cap on `C(n+r, r)` for exhaustive enumeration.
pub const DEFAULT_MAX_POINTS: usize = 35;

/// Enumeration stops with [`Error::BoundExceeded`] past this many results.
pub const MAX_TRIANGULATIONS: usize = 250_000;

/// Pairwise proper-intersection checks run only up to this many cells;
/// above it validity rests on facet pairing and volume.
const PAIRWISE_LIMIT: usize = 160;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    simplex: DilatedSimplex,
    points: Vec<SimplexPoint>,
    cells: Vec<Vec<usize>>,
}

impl Triangulation {
    /// Cells are sorted internally; indices must address `lattice_points(r, n)`.
    pub fn new(r: usize, n: u64, cells: Vec<Vec<usize>>) -> Result<Self> {
        let simplex = DilatedSimplex::new(r, n)?;
        let points = lattice_points(&simplex);
        Self::with_points(simplex, points, cells)
    }

    fn with_points(
        simplex: DilatedSimplex,
        points: Vec<SimplexPoint>,
        mut cells: Vec<Vec<usize>>,
    ) -> Result<Self> {
        for c in &mut cells {
            if let Some(&bad) = c.iter().find(|&&i| i >= points.len()) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    len: points.len(),
                });
            }
            c.sort_unstable();
        }
        cells.sort();
        Ok(Triangulation {
            simplex,
            points,
            cells,
        })
    }

    /// Build from cells given as point tuples.
    pub fn from_point_cells(r: usize, n: u64, cells: &[Vec<SimplexPoint>]) -> Result<Self> {
        let simplex = DilatedSimplex::new(r, n)?;
        let idx = cells
            .iter()
            .map(|c| {
                c.iter()
                    .map(|p| {
                        simplex.index_of(p).ok_or_else(|| {
                            Error::InvalidInput(format!("{:?} is not a point of {n}Δ^{r}", p.0))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(r, n, idx)
    }

    /// The triangulation with a single cell, the whole simplex.
    pub fn single_cell(r: usize, n: u64) -> Result<Self> {
        let simplex = DilatedSimplex::new(r, n)?;
        let cell = simplex
            .vertices()
            .iter()
            .map(|v| simplex.index_of(v).unwrap())
            .collect();
        Self::new(r, n, vec![cell])
    }

    pub fn r(&self) -> usize {
        self.simplex.r
    }

    pub fn n(&self) -> u64 {
        self.simplex.n
    }

    pub fn simplex(&self) -> DilatedSimplex {
        self.simplex
    }

    pub fn points(&self) -> &[SimplexPoint] {
        &self.points
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_points(&self, c: usize) -> Vec<&[i64]> {
        self.cells[c]
            .iter()
            .map(|&i| self.points[i].coords())
            .collect()
    }

    /// Normalized volume of a cell (0 for degenerate or wrong-arity cells).
    pub fn cell_volume(&self, c: usize) -> u128 {
        let cell = &self.cells[c];
        if cell.len() != self.r() + 1 {
            return 0;
        }
        let d = exact::det_cols(&self.cell_points(c));
        (d.unsigned_abs()) / self.n() as u128
    }

    pub fn total_volume(&self) -> u128 {
        (0..self.cells.len()).map(|c| self.cell_volume(c)).sum()
    }

    /// Point indices that occur in some cell.
    pub fn vertex_set(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.cells.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Image under a coordinate permutation.
    pub fn permuted(&self, g: &Permutation) -> Result<Triangulation> {
        let map = self.point_permutation(g)?;
        let cells = self
            .cells
            .iter()
            .map(|c| c.iter().map(|&i| map[i]).collect())
            .collect();
        Self::with_points(self.simplex, self.points.clone(), cells)
    }

    fn point_permutation(&self, g: &Permutation) -> Result<Vec<usize>> {
        self.points
            .iter()
            .map(|p| {
                let q = apply_symmetry(g, p)?;
                Ok(self
                    .simplex
                    .index_of(&q)
                    .expect("permutation preserves the simplex"))
            })
            .collect()
    }

    /// The weaker condition: every lattice point of the simplex is a vertex.
    pub fn interior_points_are_vertices(&self) -> bool {
        let used = self.vertex_set();
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.coords().iter().all(|&c| c >= 1))
            .all(|(i, _)| used.binary_search(&i).is_ok())
    }
}

/// The triangulation of `n·Δ^r` that uses every lattice point, built by
/// inserting points in lexicographic order. Unimodular for `r <= 2`.
pub fn all_points_triangulation(r: usize, n: u64) -> Result<Triangulation> {
    let simplex = DilatedSimplex::new(r, n)?;
    let points = lattice_points(&simplex);
    if r == 0 {
        return Triangulation::with_points(simplex, points, vec![vec![0]]);
    }
    let coords: Vec<Vec<i64>> = points.iter().map(|p| p.0.clone()).collect();
    let cells = crate::placing::triangulate_all_points(&coords)
        .expect("lattice points of a simplex span it");
    Triangulation::with_points(simplex, points, cells)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    WrongArity {
        cell: usize,
    },
    AffineDependence {
        cell: usize,
    },
    DuplicateCell {
        cell: usize,
    },
    /// A facet shared by cells on the same side, or by more than two cells.
    ImproperIntersection {
        cells: Vec<usize>,
        detail: String,
    },
    /// An interior facet with a cell on only one side.
    OpenFacet {
        facet: Vec<usize>,
        cell: usize,
    },
    VolumeDeficit {
        expected: u128,
        actual: u128,
    },
    VolumeExcess {
        expected: u128,
        actual: u128,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn summary(&self) -> String {
        self.violations
            .iter()
            .take(3)
            .map(|v| format!("{v:?}"))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub fn validate(t: &Triangulation) -> ValidityReport {
    let mut v = Vec::new();
    let r = t.r();
    let expected = (t.n() as u128).pow(r as u32);

    let mut good = Vec::new();
    for (ci, cell) in t.cells.iter().enumerate() {
        if cell.len() != r + 1 || cell.windows(2).any(|w| w[0] == w[1]) {
            v.push(Violation::WrongArity { cell: ci });
        } else if t.cell_volume(ci) == 0 {
            v.push(Violation::AffineDependence { cell: ci });
        } else {
            good.push(ci);
        }
    }
    for w in t.cells.windows(2).enumerate() {
        if w.1[0] == w.1[1] {
            v.push(Violation::DuplicateCell { cell: w.0 + 1 });
        }
    }

    if r > 0 {
        // facet -> [(cell, orientation of the opposite vertex)]
        let mut facets: BTreeMap<Vec<usize>, Vec<(usize, i128)>> = BTreeMap::new();
        for &ci in &good {
            let cell = &t.cells[ci];
            for skip in 0..=r {
                let facet: Vec<usize> = cell
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &i)| i)
                    .collect();
                let side = orientation(t, &facet, cell[skip]);
                facets.entry(facet).or_default().push((ci, side));
            }
        }
        for (facet, users) in facets {
            let boundary = on_boundary(t, &facet);
            match (boundary, users.as_slice()) {
                (true, [_]) => {}
                (false, [(a, sa), (b, sb)]) if sa != sb && a != b => {}
                (false, [(a, _)]) => v.push(Violation::OpenFacet { facet, cell: *a }),
                (_, many) => v.push(Violation::ImproperIntersection {
                    cells: many.iter().map(|u| u.0).collect(),
                    detail: format!("facet {facet:?} is not shared across opposite sides"),
                }),
            }
        }
    } else if good.len() > 1 {
        v.push(Violation::ImproperIntersection {
            cells: good.clone(),
            detail: "point simplex has a single cell".into(),
        });
    }

    if good.len() <= PAIRWISE_LIMIT {
        for (x, &a) in good.iter().enumerate() {
            for &b in &good[x + 1..] {
                if t.cells[a] != t.cells[b] && !cells_intersect_properly(t, a, b) {
                    v.push(Violation::ImproperIntersection {
                        cells: vec![a, b],
                        detail: "cells overlap outside a common face".into(),
                    });
                }
            }
        }
    }

    let actual = t.total_volume();
    if actual < expected {
        v.push(Violation::VolumeDeficit { expected, actual });
    } else if actual > expected {
        v.push(Violation::VolumeExcess { expected, actual });
    }
    ValidityReport { violations: v }
}

fn orientation(t: &Triangulation, facet: &[usize], apex: usize) -> i128 {
    let mut cols: Vec<&[i64]> = facet.iter().map(|&i| t.points[i].coords()).collect();
    cols.push(t.points[apex].coords());
    exact::det_cols(&cols).signum()
}

fn on_boundary(t: &Triangulation, facet: &[usize]) -> bool {
    (0..=t.r()).any(|k| facet.iter().all(|&i| t.points[i].coords()[k] == 0))
}

/// Exact proper-intersection test for two cells: they meet in a common
/// face iff no circuit of their joint vertex set has its positive part in
/// one cell and its negative part in the other.
pub fn cells_intersect_properly(t: &Triangulation, a: usize, b: usize) -> bool {
    simplices_intersect_properly(&t.points, &t.cells[a], &t.cells[b])
}

pub(crate) fn simplices_intersect_properly(
    points: &[SimplexPoint],
    a: &[usize],
    b: &[usize],
) -> bool {
    let mut union: Vec<usize> = a.iter().chain(b).copied().collect();
    union.sort_unstable();
    union.dedup();
    let in_a: Vec<bool> = union.iter().map(|i| a.contains(i)).collect();
    let in_b: Vec<bool> = union.iter().map(|i| b.contains(i)).collect();
    let dim = points[a[0]].coords().len();
    let k = union.len();
    for mask in 1u32..(1u32 << k) {
        let size = mask.count_ones() as usize;
        if size < 2 || size > dim + 1 {
            continue;
        }
        let members: Vec<usize> = (0..k).filter(|&j| mask >> j & 1 == 1).collect();
        if members.iter().all(|&j| in_a[j]) || members.iter().all(|&j| in_b[j]) {
            continue;
        }
        let cols: Vec<&[i64]> = members.iter().map(|&j| points[union[j]].coords()).collect();
        let Some(ker) = exact::kernel_line(&cols) else {
            continue;
        };
        if ker.contains(&0) {
            continue;
        }
        let fits = |sign: i128| {
            members
                .iter()
                .zip(&ker)
                .all(|(&j, &x)| if x * sign > 0 { in_a[j] } else { in_b[j] })
        };
        if fits(1) || fits(-1) {
            return false;
        }
    }
    true
}

fn require_valid(t: &Triangulation) -> Result<()> {
    let rep = validate(t);
    if rep.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidTriangulation(rep.summary()))
    }
}

/// Every cell has normalized volume 1.
pub fn is_unimodular(t: &Triangulation) -> Result<bool> {
    require_valid(t)?;
    Ok((0..t.cells.len()).all(|c| t.cell_volume(c) == 1))
}

/// All unimodular triangulations of `n·Δ^r`, in sorted order.
///
/// Depth-first: the root cell is the one containing a generic point next to
/// the lexicographically least lattice point; afterwards the least unmatched
/// interior facet is always closed by each compatible unimodular cell on its
/// far side. Each triangulation is reached exactly once.
pub fn enumerate_unimodular(r: usize, n: u64, max_points: usize) -> Result<Vec<Triangulation>> {
    let simplex = DilatedSimplex::new(r, n)?;
    if r > 3 {
        return Err(Error::Unsupported(r));
    }
    let num = simplex.num_points();
    if num > max_points {
        return Err(Error::BoundExceeded {
            what: "lattice points for enumeration",
            limit: max_points,
            actual: num,
        });
    }
    let points = lattice_points(&simplex);
    if r == 0 {
        return Ok(vec![Triangulation::with_points(
            simplex,
            points,
            vec![vec![0]],
        )?]);
    }
    let search = Search::new(simplex, &points);
    let roots = search.root_candidates();
    let count = AtomicUsize::new(0);
    let mut found: Vec<Vec<Vec<usize>>> = roots
        .par_iter()
        .flat_map_iter(|&root| {
            let mut memo = HashMap::new();
            let mut out = Vec::new();
            let mut state = State::default();
            state.place(&search, root);
            search.dfs(&mut state, &mut memo, &mut out, &count);
            out
        })
        .collect();
    let total = count.load(Ordering::Relaxed);
    if total > MAX_TRIANGULATIONS {
        return Err(Error::BoundExceeded {
            what: "unimodular triangulations",
            limit: MAX_TRIANGULATIONS,
            actual: total,
        });
    }
    for cells in &mut found {
        cells.sort();
    }
    found.sort();
    found
        .into_iter()
        .map(|cells| Triangulation::with_points(simplex, points.clone(), cells))
        .collect()
}

struct Search<'a> {
    simplex: DilatedSimplex,
    points: &'a [SimplexPoint],
    cands: Vec<Vec<usize>>,
    /// facet -> [(candidate, orientation of its apex)]
    by_facet: HashMap<Vec<usize>, Vec<(usize, i128)>>,
}

#[derive(Default)]
struct State {
    placed: Vec<usize>,
    /// unmatched interior facets with the orientation of the placed apex
    open: BTreeMap<Vec<usize>, i128>,
}

impl State {
    fn place(&mut self, s: &Search, c: usize) -> Vec<(Vec<usize>, Option<i128>)> {
        let mut undo = Vec::new();
        for (facet, side) in s.facets_of(c) {
            if s.is_boundary(&facet) {
                continue;
            }
            match self.open.remove(&facet) {
                Some(prev) => undo.push((facet, Some(prev))),
                None => {
                    self.open.insert(facet.clone(), side);
                    undo.push((facet, None));
                }
            }
        }
        self.placed.push(c);
        undo
    }

    fn unplace(&mut self, undo: Vec<(Vec<usize>, Option<i128>)>) {
        self.placed.pop();
        for (facet, prev) in undo {
            match prev {
                Some(side) => {
                    self.open.insert(facet, side);
                }
                None => {
                    self.open.remove(&facet);
                }
            }
        }
    }
}

impl<'a> Search<'a> {
    fn new(simplex: DilatedSimplex, points: &'a [SimplexPoint]) -> Self {
        let r = simplex.r;
        let n = simplex.n as u128;
        let mut cands = Vec::new();
        combinations(points.len(), r + 1, &mut |c| {
            let cols: Vec<&[i64]> = c.iter().map(|&i| points[i].coords()).collect();
            if exact::det_cols(&cols).unsigned_abs() == n {
                cands.push(c.to_vec());
            }
        });
        let mut by_facet: HashMap<Vec<usize>, Vec<(usize, i128)>> = HashMap::new();
        let mut s = Search {
            simplex,
            points,
            cands,
            by_facet: HashMap::new(),
        };
        for ci in 0..s.cands.len() {
            for (facet, side) in s.facets_of(ci) {
                by_facet.entry(facet).or_default().push((ci, side));
            }
        }
        s.by_facet = by_facet;
        s
    }

    fn facets_of(&self, c: usize) -> Vec<(Vec<usize>, i128)> {
        let cell = &self.cands[c];
        (0..cell.len())
            .map(|skip| {
                let facet: Vec<usize> = cell
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &i)| i)
                    .collect();
                let mut cols: Vec<&[i64]> =
                    facet.iter().map(|&i| self.points[i].coords()).collect();
                cols.push(self.points[cell[skip]].coords());
                (facet, exact::det_cols(&cols).signum())
            })
            .collect()
    }

    fn is_boundary(&self, facet: &[usize]) -> bool {
        (0..=self.simplex.r).any(|k| facet.iter().all(|&i| self.points[i].coords()[k] == 0))
    }

    /// Cells containing `c + ε v_1 + ε² v_2 + ...` where `c` is point 0 and
    /// `v_k = e_k - e_r` point into the simplex.
    fn root_candidates(&self) -> Vec<usize> {
        let r = self.simplex.r;
        let base = self.points[0].coords();
        let dirs: Vec<Vec<i64>> = (0..r)
            .map(|k| {
                let mut v = vec![0i64; r + 1];
                v[k] = 1;
                v[r] = -1;
                v
            })
            .collect();
        (0..self.cands.len())
            .filter(|&ci| {
                let cols: Vec<&[i64]> = self.cands[ci]
                    .iter()
                    .map(|&i| self.points[i].coords())
                    .collect();
                let frame = SimplexFrame::new(&cols).unwrap();
                let mut seqs: Vec<Vec<i128>> = vec![frame.coords(base)];
                seqs.extend(dirs.iter().map(|d| frame.coords(d)));
                (0..=r).all(|i| {
                    seqs.iter()
                        .map(|s| s[i])
                        .find(|&x| x != 0)
                        .is_some_and(|x| x > 0)
                })
            })
            .collect()
    }

    fn compatible(&self, a: usize, b: usize, memo: &mut HashMap<(usize, usize), bool>) -> bool {
        let key = (a.min(b), a.max(b));
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let v = simplices_intersect_properly(self.points, &self.cands[a], &self.cands[b]);
        memo.insert(key, v);
        v
    }

    fn dfs(
        &self,
        state: &mut State,
        memo: &mut HashMap<(usize, usize), bool>,
        out: &mut Vec<Vec<Vec<usize>>>,
        count: &AtomicUsize,
    ) {
        if count.load(Ordering::Relaxed) > MAX_TRIANGULATIONS {
            return;
        }
        let Some((facet, side)) = state.open.iter().next().map(|(f, s)| (f.clone(), *s)) else {
            count.fetch_add(1, Ordering::Relaxed);
            let cells = state
                .placed
                .iter()
                .map(|&c| self.cands[c].clone())
                .collect();
            out.push(cells);
            return;
        };
        let options = match self.by_facet.get(&facet) {
            Some(o) => o.clone(),
            None => return,
        };
        for (cand, cand_side) in options {
            if cand_side == side {
                continue;
            }
            let ok = state
                .placed
                .iter()
                .all(|&p| p != cand && self.compatible(p, cand, memo));
            if !ok {
                continue;
            }
            let undo = state.place(self, cand);
            self.dfs(state, memo, out, count);
            state.unplace(undo);
        }
    }
}

pub(crate) fn combinations(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// Lexicographically least member of the full orbit.
    pub representative: Triangulation,
    /// Positions in the input list.
    pub members: Vec<usize>,
}

/// Lexicographically least image of `t` under the symmetric group.
pub fn canonical_form(t: &Triangulation) -> Result<Triangulation> {
    let mut best: Option<Triangulation> = None;
    for g in Permutation::all(t.r() + 1) {
        let img = t.permuted(&g)?;
        if best.as_ref().is_none_or(|b| img.cells < b.cells) {
            best = Some(img);
        }
    }
    Ok(best.unwrap())
}

pub fn orbit_classes(ts: &[Triangulation]) -> Result<Vec<Orbit>> {
    if let Some(first) = ts.first() {
        if let Some(bad) = ts.iter().find(|t| t.simplex != first.simplex) {
            return Err(Error::MixedLevels(format!(
                "{}Δ^{} vs {}Δ^{}",
                first.n(),
                first.r(),
                bad.n(),
                bad.r()
            )));
        }
    }
    let mut orbits: BTreeMap<Vec<Vec<usize>>, Orbit> = BTreeMap::new();
    for (i, t) in ts.iter().enumerate() {
        let canon = canonical_form(t)?;
        orbits
            .entry(canon.cells.clone())
            .or_insert_with(|| Orbit {
                representative: canon,
                members: Vec::new(),
            })
            .members
            .push(i);
    }
    Ok(orbits.into_values().collect())
}

/// Invariance under the whole symmetric group, checked on a transposition
/// and the long cycle (which generate it).
pub fn is_invariant(t: &Triangulation) -> Result<bool> {
    require_valid(t)?;
    Ok(is_invariant_unchecked(t))
}

pub(crate) fn is_invariant_unchecked(t: &Triangulation) -> bool {
    let k = t.r() + 1;
    if k < 2 {
        return true;
    }
    [Permutation::transposition(k, 0, 1), Permutation::cycle(k)]
        .iter()
        .all(|g| {
            t.permuted(g)
                .map(|img| img.cells == t.cells)
                .unwrap_or(false)
        })
}

/// The triangulation induced on a coordinate face, reindexed into `n·Δ^s`.
pub fn restrict_to_face(t: &Triangulation, f: &FaceSelector) -> Result<Triangulation> {
    require_valid(t)?;
    restrict_to_face_unchecked(t, f)
}

pub(crate) fn restrict_to_face_unchecked(
    t: &Triangulation,
    f: &FaceSelector,
) -> Result<Triangulation> {
    if *f.support().last().unwrap() > t.r() {
        return Err(Error::InvalidInput("face outside the simplex".into()));
    }
    let s = f.dim();
    let face = DilatedSimplex::new(s, t.n())?;
    let mut cells = Vec::new();
    for cell in &t.cells {
        let on: Vec<&SimplexPoint> = cell
            .iter()
            .map(|&i| &t.points[i])
            .filter(|p| f.contains(p))
            .collect();
        if on.len() == s + 1 {
            let idx = on
                .iter()
                .map(|p| {
                    face.index_of(&restrict_point(p, f)?)
                        .ok_or(Error::NotOnFace(p.0.clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            cells.push(idx);
        }
    }
    let mut out = Triangulation::new(s, t.n(), cells)?;
    out.cells.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementCertificate {
    pub fine_level: u64,
    pub coarse_level: u64,
    /// `fine_level / coarse_level`
    pub scale: u64,
    /// For each fine cell, the index of the coarse cell containing it.
    pub map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Refusal {
    #[error("dimension mismatch: r = {fine} vs r = {coarse}")]
    DimensionMismatch { fine: usize, coarse: usize },
    #[error("level {coarse} does not divide level {fine}")]
    NotDivisible { fine: u64, coarse: u64 },
    #[error("fine cell {cell} lies in no coarse cell")]
    CellNotContained { cell: usize },
    #[error("invalid input triangulation: {0}")]
    Invalid(String),
}

/// Certify `(m, fine) >= (n, coarse)`: `n | m` and every fine cell lies in a
/// coarse cell (the least such index is recorded).
pub fn refines(
    fine: &Triangulation,
    coarse: &Triangulation,
) -> std::result::Result<RefinementCertificate, Refusal> {
    for t in [fine, coarse] {
        let rep = validate(t);
        if !rep.is_valid() {
            return Err(Refusal::Invalid(rep.summary()));
        }
    }
    refines_unchecked(fine, coarse)
}

pub(crate) fn refines_unchecked(
    fine: &Triangulation,
    coarse: &Triangulation,
) -> std::result::Result<RefinementCertificate, Refusal> {
    if fine.r() != coarse.r() {
        return Err(Refusal::DimensionMismatch {
            fine: fine.r(),
            coarse: coarse.r(),
        });
    }
    if !fine.n().is_multiple_of(coarse.n()) {
        return Err(Refusal::NotDivisible {
            fine: fine.n(),
            coarse: coarse.n(),
        });
    }
    let frames: Vec<SimplexFrame> = (0..coarse.cells.len())
        .map(|c| SimplexFrame::new(&coarse.cell_points(c)).expect("valid coarse cell"))
        .collect();
    let used = fine.vertex_set();
    // Containment in the cone over a coarse cell is containment in the
    // dilated cell, since both points sit at the fine level.
    let holders: HashMap<usize, Vec<usize>> = used
        .par_iter()
        .map(|&p| {
            let q = fine.points[p].coords();
            let hs = frames
                .iter()
                .enumerate()
                .filter(|(_, f)| f.contains(q))
                .map(|(i, _)| i)
                .collect();
            (p, hs)
        })
        .collect();
    let mut map = Vec::with_capacity(fine.cells.len());
    for (ci, cell) in fine.cells.iter().enumerate() {
        let first = &holders[&cell[0]];
        let hit = first.iter().copied().find(|c| {
            cell[1..]
                .iter()
                .all(|v| holders[v].binary_search(c).is_ok())
        });
        match hit {
            Some(c) => map.push(c),
            None => return Err(Refusal::CellNotContained { cell: ci }),
        }
    }
    Ok(RefinementCertificate {
        fine_level: fine.n(),
        coarse_level: coarse.n(),
        scale: fine.n() / coarse.n(),
        map,
    })
}

impl RefinementCertificate {
    /// Re-check every assignment with exact containment.
    pub fn verify(&self, fine: &Triangulation, coarse: &Triangulation) -> bool {
        if self.fine_level != fine.n()
            || self.coarse_level != coarse.n()
            || self.scale * coarse.n() != fine.n()
            || self.map.len() != fine.cells.len()
        {
            return false;
        }
        self.map.iter().enumerate().all(|(fc, &cc)| {
            let Some(cell) = coarse.cells.get(cc) else {
                return false;
            };
            let cols: Vec<&[i64]> = cell.iter().map(|&i| coarse.points[i].coords()).collect();
            let Some(frame) = SimplexFrame::new(&cols) else {
                return false;
            };
            fine.cells[fc]
                .iter()
                .all(|&v| frame.contains(fine.points[v].coords()))
        })
    }

    /// `self: A -> B` followed by `next: B -> C` gives `A -> C`.
    pub fn compose(&self, next: &RefinementCertificate) -> Option<RefinementCertificate> {
        if self.coarse_level != next.fine_level {
            return None;
        }
        let map = self
            .map
            .iter()
            .map(|&b| next.map.get(b).copied())
            .collect::<Option<Vec<_>>>()?;
        Some(RefinementCertificate {
            fine_level: self.fine_level,
            coarse_level: next.coarse_level,
            scale: self.scale * next.scale,
            map,
        })
    }
}

// JSON form: {"r", "n", "points", "cells"}
#[derive(Serialize, Deserialize)]
struct TriangulationJson {
    r: usize,
    n: u64,
    #[serde(default)]
    points: Option<Vec<SimplexPoint>>,
    cells: Vec<Vec<usize>>,
}

impl Serialize for Triangulation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TriangulationJson {
            r: self.r(),
            n: self.n(),
            points: Some(self.points.clone()),
            cells: self.cells.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Triangulation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TriangulationJson::deserialize(d)?;
        let t = Triangulation::new(raw.r, raw.n, raw.cells).map_err(D::Error::custom)?;
        if let Some(points) = raw.points {
            if points != t.points {
                return Err(D::Error::custom(
                    "points are not the canonical lexicographic lattice points",
                ));
            }
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(cells: &[&[&[i64]]]) -> Vec<Vec<SimplexPoint>> {
        cells
            .iter()
            .map(|c| c.iter().map(|p| SimplexPoint(p.to_vec())).collect())
            .collect()
    }

    pub(crate) fn medial() -> Triangulation {
        Triangulation::from_point_cells(
            2,
            2,
            &pts(&[
                &[&[2, 0, 0], &[1, 1, 0], &[1, 0, 1]],
                &[&[0, 2, 0], &[1, 1, 0], &[0, 1, 1]],
                &[&[0, 0, 2], &[1, 0, 1], &[0, 1, 1]],
                &[&[1, 1, 0], &[1, 0, 1], &[0, 1, 1]],
            ]),
        )
        .unwrap()
    }

    /// Fan from the midpoint (1,1,0) of the edge x3 = 0.
    pub(crate) fn midpoint_fan() -> Triangulation {
        Triangulation::from_point_cells(
            2,
            2,
            &pts(&[
                &[&[2, 0, 0], &[1, 1, 0], &[1, 0, 1]],
                &[&[0, 2, 0], &[1, 1, 0], &[0, 1, 1]],
                &[&[1, 1, 0], &[1, 0, 1], &[0, 0, 2]],
                &[&[1, 1, 0], &[0, 1, 1], &[0, 0, 2]],
            ]),
        )
        .unwrap()
    }

    #[test]
    fn medial_is_valid_and_unimodular() {
        let t = medial();
        assert!(validate(&t).is_valid());
        assert_eq!(t.total_volume(), 4);
        assert!(is_unimodular(&t).unwrap());
    }

    #[test]
    fn single_cell_is_valid_not_unimodular() {
        let t = Triangulation::single_cell(2, 2).unwrap();
        assert!(validate(&t).is_valid());
        assert!(!is_unimodular(&t).unwrap());
        for r in 0..4 {
            assert!(is_unimodular(&Triangulation::single_cell(r, 1).unwrap()).unwrap());
        }
    }

    #[test]
    fn duplicate_cells_are_improper() {
        let mut cells = medial().cells().to_vec();
        cells.push(cells[0].clone());
        let t = Triangulation::new(2, 2, cells).unwrap();
        let rep = validate(&t);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ImproperIntersection { .. })));
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DuplicateCell { .. })));
        assert!(is_unimodular(&t).is_err());
    }

    #[test]
    fn overlapping_cells_are_caught() {
        // medial cells plus a big triangle laid over them
        let mut cells = medial().cells().to_vec();
        cells[3] = Triangulation::single_cell(2, 2).unwrap().cells()[0].clone();
        let t = Triangulation::new(2, 2, cells).unwrap();
        assert!(!validate(&t).is_valid());
    }

    #[test]
    fn missing_cell_is_a_deficit() {
        let cells = medial().cells()[..3].to_vec();
        let rep = validate(&Triangulation::new(2, 2, cells).unwrap());
        assert!(rep.violations.iter().any(|v| matches!(
            v,
            Violation::VolumeDeficit {
                expected: 4,
                actual: 3
            }
        )));
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, Violation::OpenFacet { .. })));
    }

    #[test]
    fn degenerate_and_out_of_range() {
        let t = Triangulation::new(2, 2, vec![vec![0, 1, 2]]).unwrap();
        // points 0,1,2 are (0,0,2),(0,1,1),(0,2,0): collinear
        assert!(validate(&t)
            .violations
            .iter()
            .any(|v| matches!(v, Violation::AffineDependence { .. })));
        assert!(matches!(
            Triangulation::new(2, 2, vec![vec![0, 1, 9]]),
            Err(Error::IndexOutOfRange { index: 9, len: 6 })
        ));
    }

    #[test]
    fn enumeration_small_cases() {
        assert_eq!(enumerate_unimodular(2, 1, 35).unwrap().len(), 1);
        for n in 1..=6 {
            assert_eq!(enumerate_unimodular(1, n, 35).unwrap().len(), 1);
        }
        let all = enumerate_unimodular(2, 2, 35).unwrap();
        assert_eq!(all.len(), 4);
        assert!(all.contains(&medial()));
        assert!(all.contains(&midpoint_fan()));
        assert_eq!(enumerate_unimodular(0, 3, 35).unwrap().len(), 1);
    }

    #[test]
    fn enumeration_refuses_over_bound() {
        assert!(matches!(
            enumerate_unimodular(2, 7, 35),
            Err(Error::BoundExceeded { actual: 36, .. })
        ));
    }

    #[test]
    fn orbits_of_level_two() {
        let all = enumerate_unimodular(2, 2, 35).unwrap();
        let orbits = orbit_classes(&all).unwrap();
        let mut sizes: Vec<usize> = orbits.iter().map(|o| o.members.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3]);
        assert_eq!(orbit_classes(&all[..1]).unwrap().len(), 1);
        let line = enumerate_unimodular(1, 4, 35).unwrap();
        let o = orbit_classes(&line).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].members, vec![0]);
        let mixed = vec![all[0].clone(), line[0].clone()];
        assert!(matches!(orbit_classes(&mixed), Err(Error::MixedLevels(_))));
    }

    #[test]
    fn invariance() {
        assert!(is_invariant(&medial()).unwrap());
        assert!(!is_invariant(&midpoint_fan()).unwrap());
        assert!(is_invariant(&Triangulation::single_cell(3, 1).unwrap()).unwrap());
        // generator check agrees with the full group
        for t in enumerate_unimodular(2, 2, 35).unwrap() {
            let full = Permutation::all(3)
                .iter()
                .all(|g| t.permuted(g).unwrap() == t);
            assert_eq!(full, is_invariant(&t).unwrap());
        }
    }

    #[test]
    fn face_restriction() {
        let edge = FaceSelector::new([0, 1], 2).unwrap();
        let e = restrict_to_face(&medial(), &edge).unwrap();
        assert_eq!(e.r(), 1);
        assert_eq!(e, enumerate_unimodular(1, 2, 35).unwrap()[0]);
        let vertex = FaceSelector::new([2], 2).unwrap();
        let v = restrict_to_face(&midpoint_fan(), &vertex).unwrap();
        assert_eq!(v, Triangulation::single_cell(0, 2).unwrap());
        let whole = FaceSelector::new([0, 1, 2], 2).unwrap();
        assert_eq!(restrict_to_face(&medial(), &whole).unwrap(), medial());
    }

    #[test]
    fn refinement_examples() {
        let trivial = Triangulation::single_cell(2, 1).unwrap();
        let cert = refines(&medial(), &trivial).unwrap();
        assert_eq!(cert.scale, 2);
        assert_eq!(cert.map, vec![0; 4]);
        assert!(cert.verify(&medial(), &trivial));
        assert!(matches!(
            refines(&medial(), &midpoint_fan()),
            Err(Refusal::CellNotContained { .. })
        ));
        assert!(refines(&midpoint_fan(), &medial()).is_err());
        assert!(matches!(
            refines(&trivial, &medial()),
            Err(Refusal::NotDivisible { .. })
        ));
        let id = refines(&medial(), &medial()).unwrap();
        assert_eq!(id.map, vec![0, 1, 2, 3]);
    }

    #[test]
    fn json_round_trip() {
        let t = medial();
        let s = serde_json::to_string(&t).unwrap();
        let back: Triangulation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"r":2,"n":2,"cells":[[0,1,7]]}"#;
        assert!(serde_json::from_str::<Triangulation>(bad).is_err());
        let wrong_points = r#"{"r":1,"n":1,"points":[[1,0],[0,1]],"cells":[[0,1]]}"#;
        assert!(serde_json::from_str::<Triangulation>(wrong_points).is_err());
    }

    #[test]
    fn all_points_is_unimodular_in_low_dimension() {
        for (r, n) in [(0, 2), (1, 5), (2, 1), (2, 3), (2, 6)] {
            let t = all_points_triangulation(r, n).unwrap();
            assert!(is_unimodular(&t).unwrap(), "r={r} n={n}");
        }
    }

    #[test]
    fn parenthetical_predicate_is_weaker_in_dimension_three() {
        // single cell of 2Δ³ has no interior lattice points yet volume 8
        let t = Triangulation::single_cell(3, 2).unwrap();
        assert!(t.interior_points_are_vertices());
        assert!(!is_unimodular(&t).unwrap());
    }
}
