//! Local charts glued along faces, each carrying the tower triangulation of
//! its rank, and the check that glued faces carry the same subdivision.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{apply_symmetry, FaceSelector, Permutation, SimplexPoint};
use crate::tower::CofinalTower;
use crate::triangulation::{restrict_to_face_unchecked, Triangulation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalChart {
    pub id: usize,
    /// Rank of the stalk monoid, `r + 1` for a chart modelled on `Δ^r`.
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRef {
    pub chart: usize,
    pub face: Vec<usize>,
}

/// `iso` sends position `j` of `a.face` to position `iso(j)` of `b.face`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceGluing {
    pub a: FaceRef,
    pub b: FaceRef,
    pub iso: Permutation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingConfig {
    pub charts: Vec<LocalChart>,
    pub gluings: Vec<FaceGluing>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// The offending cell, in the coordinates of face `b`.
    pub cell: Vec<SimplexPoint>,
    /// Which side has the cell: `"a"` (after transport) or `"b"`.
    pub present_on: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("gluing {gluing}: {detail}")]
pub struct CompatibilityError {
    pub gluing: usize,
    pub detail: String,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GluingCheck {
    pub gluing: usize,
    pub face_dim: usize,
    pub cells: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GlobalSubdivision {
    pub level: u64,
    /// Chart id to the triangulation of its rank.
    pub charts: BTreeMap<usize, Triangulation>,
    pub checks: Vec<GluingCheck>,
}

/// Triangulations for ranks `1..=r+1` from tower entry `index` (0-based):
/// the entry itself and its restrictions to the initial faces.
pub fn level_entries(tower: &CofinalTower, index: usize) -> Result<Vec<Triangulation>> {
    let entry = tower.entries.get(index).ok_or(Error::IndexOutOfRange {
        index,
        len: tower.entries.len(),
    })?;
    (0..=tower.r)
        .map(|s| {
            let face = FaceSelector::new(0..=s, tower.r)?;
            restrict_to_face_unchecked(&entry.triangulation, &face)
        })
        .collect()
}

/// Check every gluing; `entries` holds one triangulation per occurring rank,
/// all at one level.
pub fn assemble_global(
    charts: &[LocalChart],
    gluings: &[FaceGluing],
    entries: &[Triangulation],
) -> Result<GlobalSubdivision> {
    let mut by_rank: BTreeMap<usize, &Triangulation> = BTreeMap::new();
    for t in entries {
        if by_rank.insert(t.r() + 1, t).is_some() {
            return Err(Error::InvalidInput(format!(
                "two triangulations for rank {}",
                t.r() + 1
            )));
        }
    }
    let level = match entries.first() {
        Some(t) => t.n(),
        None => return Err(Error::InvalidInput("no triangulations supplied".into())),
    };
    if let Some(t) = entries.iter().find(|t| t.n() != level) {
        return Err(Error::MixedLevels(format!("levels {level} and {}", t.n())));
    }
    let mut chart_map: BTreeMap<usize, Triangulation> = BTreeMap::new();
    for c in charts {
        let t = by_rank.get(&c.rank).ok_or_else(|| {
            Error::InvalidInput(format!(
                "no triangulation for rank {} (chart {})",
                c.rank, c.id
            ))
        })?;
        if chart_map.insert(c.id, (*t).clone()).is_some() {
            return Err(Error::InvalidInput(format!("duplicate chart id {}", c.id)));
        }
    }
    let results: Vec<std::result::Result<GluingCheck, CompatibilityError>> = gluings
        .par_iter()
        .enumerate()
        .map(|(i, g)| check_gluing(i, g, &chart_map))
        .collect();
    let mut checks = Vec::with_capacity(results.len());
    for r in results {
        checks.push(r?);
    }
    Ok(GlobalSubdivision {
        level,
        charts: chart_map,
        checks,
    })
}

fn check_gluing(
    id: usize,
    g: &FaceGluing,
    charts: &BTreeMap<usize, Triangulation>,
) -> std::result::Result<GluingCheck, CompatibilityError> {
    let fail = |detail: String| CompatibilityError {
        gluing: id,
        detail,
        witness: None,
    };
    let side = |f: &FaceRef| -> std::result::Result<Triangulation, CompatibilityError> {
        let t = charts
            .get(&f.chart)
            .ok_or_else(|| fail(format!("unknown chart {}", f.chart)))?;
        let sel = FaceSelector::new(f.face.iter().copied(), t.r())
            .map_err(|e| fail(format!("bad face {:?} of chart {}: {e}", f.face, f.chart)))?;
        if sel.support().len() != f.face.len() {
            return Err(fail(format!("face {:?} repeats a coordinate", f.face)));
        }
        restrict_to_face_unchecked(t, &sel).map_err(|e| fail(e.to_string()))
    };
    if g.a.face.len() != g.b.face.len() {
        return Err(fail(format!(
            "faces have {} and {} vertices",
            g.a.face.len(),
            g.b.face.len()
        )));
    }
    if g.iso.arity() != g.a.face.len() {
        return Err(fail(format!(
            "identification permutes {} vertices, faces have {}",
            g.iso.arity(),
            g.a.face.len()
        )));
    }
    let ta = side(&g.a)?;
    let tb = side(&g.b)?;
    let cells_of = |t: &Triangulation, map: Option<&Permutation>| -> BTreeSet<Vec<SimplexPoint>> {
        t.cells()
            .iter()
            .map(|c| {
                let mut pts: Vec<SimplexPoint> = c
                    .iter()
                    .map(|&i| {
                        let p = &t.points()[i];
                        match map {
                            Some(iso) => apply_symmetry(iso, p).expect("arity checked"),
                            None => p.clone(),
                        }
                    })
                    .collect();
                pts.sort();
                pts
            })
            .collect()
    };
    let moved = cells_of(&ta, Some(&g.iso));
    let target = cells_of(&tb, None);
    let only_a = moved.difference(&target).next();
    let only_b = target.difference(&moved).next();
    let witness = match (only_a, only_b) {
        (None, None) => None,
        (Some(a), Some(b)) if b < a => Some((b.clone(), "b")),
        (Some(a), _) => Some((a.clone(), "a")),
        (None, Some(b)) => Some((b.clone(), "b")),
    };
    match witness {
        None => Ok(GluingCheck {
            gluing: id,
            face_dim: g.a.face.len() - 1,
            cells: target.len(),
        }),
        Some((cell, present_on)) => Err(CompatibilityError {
            gluing: id,
            detail: format!(
                "restrictions to faces {:?} of chart {} and {:?} of chart {} differ",
                g.a.face, g.a.chart, g.b.face, g.b.chart
            ),
            witness: Some(Witness { cell, present_on }),
        }),
    }
}
