//! Triangulating a point set so that every point is a vertex.
//!
//! Points are processed in the given order: a point outside the current
//! hull is joined to the boundary facets it sees, a point inside is
//! inserted by stellar subdivision of every cell containing it.

use std::collections::HashMap;

use crate::exact::{self, SimplexFrame};

/// Cells (as indices into `points`) of a triangulation of `conv(points)`
/// using every point. All points must share a level; `None` when they do
/// not affinely span a full-dimensional simplex.
pub(crate) fn triangulate_all_points(points: &[Vec<i64>]) -> Option<Vec<Vec<usize>>> {
    let d = points.first()?.len();
    let mut basis: Vec<usize> = Vec::with_capacity(d);
    for i in 0..points.len() {
        let mut trial: Vec<&[i64]> = basis.iter().map(|&j| points[j].as_slice()).collect();
        trial.push(&points[i]);
        if exact::independent(&trial) {
            basis.push(i);
            if basis.len() == d {
                break;
            }
        }
    }
    if basis.len() < d {
        return None;
    }
    let mut cells: Vec<Vec<usize>> = vec![basis.clone()];
    for p in 0..points.len() {
        if basis.contains(&p) {
            continue;
        }
        let q = points[p].as_slice();
        let mut containing = Vec::new();
        for (ci, cell) in cells.iter().enumerate() {
            let cols: Vec<&[i64]> = cell.iter().map(|&i| points[i].as_slice()).collect();
            let frame = SimplexFrame::new(&cols)?;
            if frame.contains(q) {
                containing.push((ci, frame.coords(q)));
            }
        }
        if containing.is_empty() {
            place_outside(points, &mut cells, p);
        } else {
            let mut added = Vec::new();
            for (ci, lambda) in &containing {
                let cell = &cells[*ci];
                for (k, &l) in lambda.iter().enumerate() {
                    if l > 0 {
                        let mut c = cell.clone();
                        c[k] = p;
                        added.push(c);
                    }
                }
            }
            let drop: Vec<usize> = containing.iter().map(|c| c.0).collect();
            let mut kept: Vec<Vec<usize>> = cells
                .into_iter()
                .enumerate()
                .filter(|(i, _)| !drop.contains(i))
                .map(|(_, c)| c)
                .collect();
            kept.extend(added);
            cells = kept;
        }
    }
    for c in &mut cells {
        c.sort_unstable();
    }
    cells.sort();
    Some(cells)
}

fn place_outside(points: &[Vec<i64>], cells: &mut Vec<Vec<usize>>, p: usize) {
    let mut facets: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
    for cell in cells.iter() {
        for skip in 0..cell.len() {
            let mut f: Vec<usize> = cell
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &i)| i)
                .collect();
            f.sort_unstable();
            facets.entry(f).or_insert((0, cell[skip])).0 += 1;
        }
    }
    let side = |f: &[usize], apex: usize| {
        let mut cols: Vec<&[i64]> = f.iter().map(|&i| points[i].as_slice()).collect();
        cols.push(&points[apex]);
        exact::det_cols(&cols).signum()
    };
    let mut visible: Vec<Vec<usize>> = facets
        .into_iter()
        .filter(|(_, (count, _))| *count == 1)
        .filter(|(f, (_, apex))| side(f, *apex) * side(f, p) < 0)
        .map(|(f, _)| f)
        .collect();
    visible.sort();
    for mut f in visible {
        f.push(p);
        cells.push(f);
    }
}
