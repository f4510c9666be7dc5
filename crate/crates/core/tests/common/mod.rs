//! Independent oracles for the integration suites. Nothing here calls the
//! library's geometry; inputs and outputs are plain integers.
#![allow(dead_code)]

use std::collections::BTreeMap;

/// Exact determinant by fraction-free elimination.
pub fn det(m: &[Vec<i128>]) -> i128 {
    let k = m.len();
    if k == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for i in 0..k {
        let Some(p) = (i..k).find(|&r| a[r][i] != 0) else {
            return 0;
        };
        if p != i {
            a.swap(p, i);
            sign = -sign;
        }
        for r in i + 1..k {
            for c in i + 1..k {
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) / prev;
            }
            a[r][i] = 0;
        }
        prev = a[i][i];
    }
    sign * a[k - 1][k - 1]
}

/// Normalized volume of a lattice simplex on `Σx = const`, computed in the
/// first `r` coordinates.
pub fn simplex_volume(vertices: &[Vec<i64>]) -> u128 {
    let r = vertices.len() - 1;
    let rows: Vec<Vec<i128>> = vertices[1..]
        .iter()
        .map(|v| (0..r).map(|k| (v[k] - vertices[0][k]) as i128).collect())
        .collect();
    det(&rows).unsigned_abs()
}

/// Number of `(x_0..x_r) ∈ (Z/n)^{r+1}` with `Σx ≡ 0`.
pub fn kernel_size(r: usize, n: u64) -> u128 {
    let total = (n as u128).pow(r as u32 + 1);
    (0..total)
        .filter(|&code| {
            let mut c = code;
            let mut s = 0u128;
            for _ in 0..=r {
                s += c % n as u128;
                c /= n as u128;
            }
            s.is_multiple_of(n as u128)
        })
        .count() as u128
}

/// Order and exponent of `Z^d / L` for `L` spanned by the rows of `basis`,
/// assuming `n·Z^d ⊂ L`. Counts residues in the box `[0, n)^d`.
pub fn coset_structure(basis: &[Vec<i64>], n: u64) -> (u128, u64) {
    let d = basis.len();
    let b: Vec<Vec<i128>> = basis
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let dt = det(&b);
    assert_ne!(dt, 0);
    // x ∈ L iff x · adj(B) ≡ 0 (mod det B).
    let adj: Vec<Vec<i128>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let minor: Vec<Vec<i128>> = (0..d)
                        .filter(|&r| r != j)
                        .map(|r| (0..d).filter(|&c| c != i).map(|c| b[r][c]).collect())
                        .collect();
                    let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                    s * det(&minor)
                })
                .collect()
        })
        .collect();
    let member =
        |x: &[i128]| (0..d).all(|j| (0..d).map(|i| x[i] * adj[i][j]).sum::<i128>() % dt == 0);
    let mut inside = 0u128;
    let mut exponent = 1u64;
    let total = (n as u128).pow(d as u32);
    for code in 0..total {
        let mut c = code;
        let x: Vec<i128> = (0..d)
            .map(|_| {
                let v = (c % n as u128) as i128;
                c /= n as u128;
                v
            })
            .collect();
        if member(&x) {
            inside += 1;
        }
        let ord = (1..=n)
            .find(|&k| member(&x.iter().map(|v| v * k as i128).collect::<Vec<_>>()))
            .expect("n kills the quotient");
        exponent = exponent.max(ord);
    }
    (total / inside, exponent)
}

/// Is `p / scale` in the simplex with the given vertices (all on one level)?
pub fn point_in_simplex(p: &[i64], scale: i64, vertices: &[Vec<i64>]) -> bool {
    let r = vertices.len() - 1;
    let m: Vec<Vec<i128>> = (0..r)
        .map(|k| {
            (1..=r)
                .map(|j| ((vertices[j][k] - vertices[0][k]) * scale) as i128)
                .collect()
        })
        .collect();
    let rhs: Vec<i128> = (0..r)
        .map(|k| (p[k] - vertices[0][k] * scale) as i128)
        .collect();
    let d = det(&m);
    if d == 0 {
        return false;
    }
    let mut lambda_sum = 0i128;
    for j in 0..r {
        let mut mj = m.clone();
        for k in 0..r {
            mj[k][j] = rhs[k];
        }
        let num = det(&mj);
        // λ_j = num / d must be >= 0.
        if num != 0 && (num < 0) != (d < 0) {
            return false;
        }
        lambda_sum += num * d.signum();
    }
    lambda_sum <= d.abs()
}

/// Points of `n·Δ^r` in lexicographic order.
pub fn simplex_points(r: usize, n: i64) -> Vec<Vec<i64>> {
    fn rec(prefix: &mut Vec<i64>, left: i64, k: usize, out: &mut Vec<Vec<i64>>) {
        if k == 0 {
            let mut p = prefix.clone();
            p.push(left);
            out.push(p);
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            rec(prefix, left - a, k - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, r, &mut out);
    out
}

/// Orientation of point `q` against the facet hyperplane through `facet`
/// (within the first `r` coordinates), relative to `apex`.
fn side(facet: &[&Vec<i64>], q: &[i64], r: usize) -> i128 {
    let rows: Vec<Vec<i128>> = facet[1..]
        .iter()
        .map(|v| (0..r).map(|k| (v[k] - facet[0][k]) as i128).collect())
        .chain(std::iter::once(
            (0..r).map(|k| (q[k] - facet[0][k]) as i128).collect(),
        ))
        .collect();
    det(&rows).signum()
}

/// Count triangulations of `n·Δ^r` into unimodular simplices by brute force:
/// sets of `n^r` unit simplices where every interior facet is shared by two
/// cells lying on opposite sides and every boundary facet occurs once.
pub fn count_unimodular_triangulations(r: usize, n: i64) -> usize {
    let pts = simplex_points(r, n);
    let cells: Vec<Vec<usize>> = combinations(pts.len(), r + 1)
        .into_iter()
        .filter(|c| simplex_volume(&c.iter().map(|&i| pts[i].clone()).collect::<Vec<_>>()) == 1)
        .collect();
    let on_boundary = |f: &[usize]| (0..=r).any(|k| f.iter().all(|&i| pts[i][k] == 0));
    // facet -> cells containing it, with the side of the opposite vertex
    let mut by_facet: BTreeMap<Vec<usize>, Vec<(usize, i128)>> = BTreeMap::new();
    for (ci, c) in cells.iter().enumerate() {
        for skip in 0..=r {
            let f: Vec<usize> = c
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .map(|(_, &v)| v)
                .collect();
            let fp: Vec<&Vec<i64>> = f.iter().map(|&i| &pts[i]).collect();
            let s = side(&fp, &pts[c[skip]], r);
            by_facet.entry(f).or_default().push((ci, s));
        }
    }
    let target = (n as usize).pow(r as u32);
    let mut count = 0;
    let mut used = vec![false; cells.len()];
    let mut open: BTreeMap<Vec<usize>, i128> = BTreeMap::new();
    #[allow(clippy::too_many_arguments)]
    fn search(
        cells: &[Vec<usize>],
        by_facet: &BTreeMap<Vec<usize>, Vec<(usize, i128)>>,
        on_boundary: &dyn Fn(&[usize]) -> bool,
        used: &mut Vec<bool>,
        open: &mut BTreeMap<Vec<usize>, i128>,
        chosen: usize,
        target: usize,
        r: usize,
        count: &mut usize,
    ) {
        if chosen == target {
            if open.is_empty() {
                *count += 1;
            }
            return;
        }
        let Some((facet, s)) = open.iter().next().map(|(f, s)| (f.clone(), *s)) else {
            return;
        };
        for &(ci, cs) in &by_facet[&facet] {
            if used[ci] || cs != -s {
                continue;
            }
            // every facet of the new cell must be open with the opposite side, or new
            let c = &cells[ci];
            let mut changes = Vec::new();
            let mut ok = true;
            for skip in 0..=r {
                let f: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let side = by_facet[&f].iter().find(|(x, _)| *x == ci).unwrap().1;
                match open.get(&f) {
                    Some(&o) if o == -side => changes.push((f, None)),
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None if on_boundary(&f) => {}
                    None => changes.push((f, Some(side))),
                }
            }
            if !ok {
                continue;
            }
            let mut undo = Vec::new();
            for (f, v) in &changes {
                match v {
                    None => undo.push((f.clone(), open.remove(f))),
                    Some(s) => {
                        open.insert(f.clone(), *s);
                        undo.push((f.clone(), None));
                    }
                }
            }
            used[ci] = true;
            search(
                cells,
                by_facet,
                on_boundary,
                used,
                open,
                chosen + 1,
                target,
                r,
                count,
            );
            used[ci] = false;
            for (f, prev) in undo {
                match prev {
                    Some(s) => {
                        open.insert(f, s);
                    }
                    None => {
                        open.remove(&f);
                    }
                }
            }
        }
    }
    // Root: the cells containing the corner (0,...,0,n); exactly one is used.
    let corner = 0usize;
    for ci in 0..cells.len() {
        if !cells[ci].contains(&corner) {
            continue;
        }
        let c = &cells[ci];
        open.clear();
        for skip in 0..=r {
            let f: Vec<usize> = c
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .map(|(_, &v)| v)
                .collect();
            if !on_boundary(&f) {
                let side = by_facet[&f].iter().find(|(x, _)| *x == ci).unwrap().1;
                open.insert(f, side);
            }
        }
        // Only count sets where this is the least cell containing the corner.
        used.iter_mut().for_each(|u| *u = false);
        for (cj, other) in cells.iter().enumerate().take(ci) {
            if other.contains(&corner) {
                used[cj] = true;
            }
        }
        used[ci] = true;
        search(
            &cells,
            &by_facet,
            &on_boundary,
            &mut used,
            &mut open,
            1,
            target,
            r,
            &mut count,
        );
    }
    count
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Gcd of all `k x k` minors, for `k = 1..=min(rows, cols)`.
pub fn determinantal_divisors(a: &[Vec<i64>]) -> Vec<i128> {
    let (m, n) = (a.len(), a.first().map_or(0, |r| r.len()));
    (1..=m.min(n))
        .map(|k| {
            let mut g = 0i128;
            for rows in combinations(m, k) {
                for cols in combinations(n, k) {
                    let minor: Vec<Vec<i128>> = rows
                        .iter()
                        .map(|&i| cols.iter().map(|&j| a[i][j] as i128).collect())
                        .collect();
                    g = gcd(g, det(&minor));
                }
            }
            g
        })
        .collect()
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
