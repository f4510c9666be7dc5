//! Small exact linear algebra on machine integers for simplex-level work.
//!
//! Points of dilated simplices have small coordinates, so determinants of at
//! most `(r+1) x (r+1)` matrices fit comfortably in `i128`. All arithmetic is
//! checked; an overflow panics instead of silently wrapping.

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(rows: &[Vec<i128>]) -> i128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut a = rows.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = mul(a[i][j], a[k][k]) - mul(a[i][k], a[k][j]);
                a[i][j] = v / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

#[inline]
fn mul(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("exact arithmetic overflow")
}

pub fn to_i128(v: &[i64]) -> Vec<i128> {
    v.iter().map(|&x| x as i128).collect()
}

/// Determinant of the square matrix whose columns are `cols`.
pub fn det_cols(cols: &[&[i64]]) -> i128 {
    let n = cols.len();
    let rows: Vec<Vec<i128>> = (0..n)
        .map(|i| cols.iter().map(|c| c[i] as i128).collect())
        .collect();
    det(&rows)
}

/// Rank of a set of integer vectors.
pub fn rank(vectors: &[Vec<i128>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut a = vectors.to_vec();
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c] != 0 {
                let (x, y) = (a[r][c], a[i][c]);
                for j in c..cols {
                    a[i][j] = mul(a[i][j], x) - mul(a[r][j], y);
                }
                let g = a[i].iter().fold(0i128, |g, &v| gcd(g, v));
                if g > 1 {
                    a[i].iter_mut().for_each(|v| *v /= g);
                }
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a as i128, b as i128) as u64 * b
}

/// Linear independence of point vectors (equivalently affine independence
/// for points on a common level hyperplane).
pub fn independent(points: &[&[i64]]) -> bool {
    let v: Vec<Vec<i128>> = points.iter().map(|p| to_i128(p)).collect();
    rank(&v) == points.len()
}

/// Precomputed inverse of a full-dimensional simplex (columns = vertices):
/// `adj * p = det * λ` gives barycentric (equivalently conic) coordinates.
#[derive(Clone, Debug)]
pub struct SimplexFrame {
    adj: Vec<Vec<i128>>,
    det: i128,
}

impl SimplexFrame {
    /// `None` when the vertices are linearly dependent.
    pub fn new(vertices: &[&[i64]]) -> Option<Self> {
        let n = vertices.len();
        let m: Vec<Vec<i128>> = (0..n)
            .map(|i| vertices.iter().map(|v| v[i] as i128).collect())
            .collect();
        let d = det(&m);
        if d == 0 {
            return None;
        }
        // adj[i][j] = (-1)^(i+j) * minor(j, i)
        let mut adj = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<i128>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| m[r][c]).collect())
                    .collect();
                let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                adj[i][j] = s * det(&minor);
            }
        }
        Some(SimplexFrame { adj, det: d })
    }

    #[cfg(test)]
    pub fn det(&self) -> i128 {
        self.det
    }

    /// Coordinates of `p`, scaled by `det` and sign-normalised so that
    /// the denominator is positive.
    pub fn coords(&self, p: &[i64]) -> Vec<i128> {
        let s = self.det.signum();
        self.adj
            .iter()
            .map(|row| {
                s * row
                    .iter()
                    .zip(p)
                    .map(|(a, &x)| mul(*a, x as i128))
                    .sum::<i128>()
            })
            .collect()
    }

    /// True iff `p` lies in the closed cone spanned by the vertices.
    pub fn contains(&self, p: &[i64]) -> bool {
        let s = self.det.signum();
        self.adj.iter().all(|row| {
            s * row
                .iter()
                .zip(p)
                .map(|(a, &x)| mul(*a, x as i128))
                .sum::<i128>()
                >= 0
        })
    }
}

/// One nonzero kernel vector of the columns `cols`, when the kernel is
/// exactly one-dimensional.
pub fn kernel_line(cols: &[&[i64]]) -> Option<Vec<i128>> {
    let k = cols.len();
    let d = cols[0].len();
    // Row-reduce the d x k matrix.
    let mut a: Vec<Vec<i128>> = (0..d)
        .map(|i| cols.iter().map(|c| c[i] as i128).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..d).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..d {
            if i != r && a[i][c] != 0 {
                let (x, y) = (a[r][c], a[i][c]);
                for j in 0..k {
                    a[i][j] = mul(a[i][j], x) - mul(a[r][j], y);
                }
                let g = a[i].iter().fold(0i128, |g, &v| gcd(g, v));
                if g > 1 {
                    a[i].iter_mut().for_each(|v| *v /= g);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == d {
            break;
        }
    }
    if pivots.len() + 1 != k {
        return None;
    }
    let free = (0..k).find(|c| !pivots.contains(c)).unwrap();
    // x_free = L, x_pivot(row i) = -a[i][free] * L / a[i][pivot]
    let l = pivots.iter().enumerate().fold(1i128, |l, (i, &c)| {
        let p = a[i][c].abs();
        l / gcd(l, p) * p
    });
    let mut x = vec![0i128; k];
    x[free] = l;
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = -mul(a[i][free], l) / a[i][c];
    }
    let g = x.iter().fold(0i128, |g, &v| gcd(g, v));
    Some(x.into_iter().map(|v| v / g).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(det(&[vec![2, 1, 1], vec![0, 1, 0], vec![0, 0, 1]]), 2);
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), 0);
        assert_eq!(det_cols(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]), 8);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&[vec![1, 1, 0], vec![2, 2, 0], vec![0, 0, 1]]), 2);
        assert_eq!(rank(&[vec![0, 0]]), 0);
    }

    #[test]
    fn frame_coordinates() {
        let f = SimplexFrame::new(&[&[2, 0, 0], &[1, 1, 0], &[1, 0, 1]]).unwrap();
        assert_eq!(f.det(), 2);
        // (3,1,0)... not at level 2; use a level-2 point
        assert!(f.contains(&[2, 0, 0]));
        assert!(f.contains(&[1, 1, 0]));
        assert!(!f.contains(&[0, 1, 1]));
        let c = f.coords(&[4, 1, 1]);
        // 4,1,1 = 2*(2,0,0) + 1*(1,1,0) + ... check: (2,0,0)+(1,1,0)+(1,0,1) = (4,1,1)
        assert_eq!(c, vec![2, 2, 2]);
    }

    #[test]
    fn kernels() {
        let k = kernel_line(&[&[2, 0], &[0, 2], &[1, 1]]).unwrap();
        // (2,0) + (0,2) - 2 (1,1) = 0
        let k = if k[0] < 0 {
            k.iter().map(|x| -x).collect()
        } else {
            k
        };
        assert_eq!(k, vec![1, 1, -2]);
        assert!(kernel_line(&[&[1, 0], &[0, 1]]).is_none());
    }
}
