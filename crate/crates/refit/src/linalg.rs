//! Minimal dense linear algebra: a row-major matrix and a minimum-norm
//! least-squares solver built on a column-pivoted Householder QR.
//!
//! Matrices here are small (design matrices with a handful of columns), so
//! the implementation favors clarity over blocking.

use serde::{Deserialize, Serialize};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Build from a flat row-major buffer. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer length must be rows*cols");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `A * v` for a length-`cols` vector.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum::<f64>())
            .collect()
    }
}

/// Minimum-norm least-squares solution of `A x ~ b`.
///
/// Uses a column-pivoted Householder QR to reveal the numerical rank; when
/// the design is rank deficient the unique solution of minimum Euclidean
/// norm is recovered from a second orthogonal factorization of the leading
/// rows of `R`. Always returns a length-`cols` vector for finite input.
pub fn min_norm_lstsq(a: &Matrix, b: &[f64]) -> Vec<f64> {
    assert_eq!(a.rows(), b.len(), "rhs length must match row count");
    let m = a.rows();
    let k = a.cols();
    let mut r = a.clone();
    let mut y = b.to_vec();
    let mut perm: Vec<usize> = (0..k).collect();

    let steps = m.min(k);
    for s in 0..steps {
        // Pivot: bring the remaining column with the largest trailing norm up front.
        let mut best = s;
        let mut best_norm = 0.0;
        for j in s..k {
            let norm: f64 = (s..m).map(|i| r.get(i, j).powi(2)).sum();
            if norm > best_norm {
                best_norm = norm;
                best = j;
            }
        }
        if best != s {
            for i in 0..m {
                let tmp = r.get(i, s);
                r.set(i, s, r.get(i, best));
                r.set(i, best, tmp);
            }
            perm.swap(s, best);
        }

        let norm_x = best_norm.sqrt();
        if norm_x == 0.0 {
            continue; // trailing block is all zero
        }

        // Householder reflector for column s.
        let x0 = r.get(s, s);
        let alpha = if x0 >= 0.0 { -norm_x } else { norm_x };
        let mut v: Vec<f64> = (s..m).map(|i| r.get(i, s)).collect();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|t| t * t).sum();
        if vtv == 0.0 {
            continue;
        }

        r.set(s, s, alpha);
        for i in s + 1..m {
            r.set(i, s, 0.0);
        }
        for j in s + 1..k {
            let dot: f64 = (s..m).map(|i| v[i - s] * r.get(i, j)).sum();
            let scale = 2.0 * dot / vtv;
            for i in s..m {
                let val = r.get(i, j) - scale * v[i - s];
                r.set(i, j, val);
            }
        }
        let dot: f64 = (s..m).map(|i| v[i - s] * y[i]).sum();
        let scale = 2.0 * dot / vtv;
        for (i, vi) in v.iter().enumerate() {
            y[s + i] -= scale * vi;
        }
    }

    // Numerical rank from the pivoted diagonal of R.
    let tol = (m.max(k) as f64) * f64::EPSILON * r.get(0, 0).abs();
    let mut rank = 0;
    for s in 0..steps {
        if r.get(s, s).abs() > tol {
            rank += 1;
        } else {
            break;
        }
    }

    let mut z = vec![0.0; k];
    if rank == 0 {
        return z; // zero design: minimum-norm solution is the zero vector
    }

    if rank == k {
        // Full column rank: plain back substitution.
        for i in (0..k).rev() {
            let mut sum = y[i];
            for j in i + 1..k {
                sum -= r.get(i, j) * z[j];
            }
            z[i] = sum / r.get(i, i);
        }
    } else {
        // Rank deficient: factor S^T = U T with S the leading rank x k block
        // of R, then the minimum-norm solution is z = U (T^T)^{-1} c.
        let mut st = Matrix::zeros(k, rank); // S transposed
        for i in 0..rank {
            for j in 0..k {
                st.set(j, i, r.get(i, j));
            }
        }
        let (u, t) = thin_qr(&st);
        // Forward substitution on T^T w = c.
        let mut w = vec![0.0; rank];
        for i in 0..rank {
            let mut sum = y[i];
            for j in 0..i {
                sum -= t.get(j, i) * w[j];
            }
            w[i] = sum / t.get(i, i);
        }
        for j in 0..k {
            z[j] = (0..rank).map(|i| u.get(j, i) * w[i]).sum();
        }
    }

    // Undo the column permutation.
    let mut x = vec![0.0; k];
    for (pos, &orig) in perm.iter().enumerate() {
        x[orig] = z[pos];
    }
    x
}

/// Thin Householder QR of a full-column-rank matrix: `a = q * t` with `q`
/// having orthonormal columns and `t` upper triangular.
fn thin_qr(a: &Matrix) -> (Matrix, Matrix) {
    let m = a.rows();
    let k = a.cols();
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);

    for s in 0..k {
        let norm_x: f64 = (s..m).map(|i| r.get(i, s).powi(2)).sum::<f64>().sqrt();
        let x0 = r.get(s, s);
        let alpha = if x0 >= 0.0 { -norm_x } else { norm_x };
        let mut v: Vec<f64> = (s..m).map(|i| r.get(i, s)).collect();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|t| t * t).sum();
        if vtv > 0.0 {
            r.set(s, s, alpha);
            for i in s + 1..m {
                r.set(i, s, 0.0);
            }
            for j in s + 1..k {
                let dot: f64 = (s..m).map(|i| v[i - s] * r.get(i, j)).sum();
                let scale = 2.0 * dot / vtv;
                for i in s..m {
                    let val = r.get(i, j) - scale * v[i - s];
                    r.set(i, j, val);
                }
            }
        }
        reflectors.push(v);
    }

    // Accumulate Q by applying the reflectors to the identity columns.
    let mut q = Matrix::zeros(m, k);
    for j in 0..k {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        for s in (0..k).rev() {
            let v = &reflectors[s];
            let vtv: f64 = v.iter().map(|t| t * t).sum();
            if vtv == 0.0 {
                continue;
            }
            let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * e[s + i]).sum();
            let scale = 2.0 * dot / vtv;
            for (i, vi) in v.iter().enumerate() {
                e[s + i] -= scale * vi;
            }
        }
        for i in 0..m {
            q.set(i, j, e[i]);
        }
    }

    let mut t = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            t.set(i, j, r.get(i, j));
        }
    }
    (q, t)
}
