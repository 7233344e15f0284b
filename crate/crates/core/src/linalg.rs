//! Small dense linear algebra: column-major matrices and Cholesky solves.
//!
//! The problems solved here are tiny (active sets of a least-angle path,
//! fixed-effect normal equations, spline borders of the EDA solver), so a
//! straightforward implementation is all that is needed.

use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

/// Dense column-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Matrix { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    /// Builds a matrix from column-major storage.
    pub fn from_col_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), nrows * ncols, "storage size mismatch");
        Matrix { nrows, ncols, data }
    }

    pub fn from_columns(nrows: usize, cols: &[Vec<f64>]) -> Self {
        let mut data = Vec::with_capacity(nrows * cols.len());
        for c in cols {
            assert_eq!(c.len(), nrows, "column length mismatch");
            data.extend_from_slice(c);
        }
        Matrix { nrows, ncols: cols.len(), data }
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                m.data[j * nrows + i] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nrows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.nrows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.ncols).map(|j| self.get(i, j)).collect()
    }

    /// Keeps the listed columns in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.nrows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        Matrix { nrows: self.nrows, ncols: idx.len(), data }
    }

    /// `A x`
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (o, a) in out.iter_mut().zip(self.col(j)) {
                    *o += a * xj;
                }
            }
        }
        out
    }

    /// `Aᵀ y`
    pub fn tmatvec(&self, y: &[f64]) -> Vec<f64> {
        (0..self.ncols).map(|j| dot(self.col(j), y)).collect()
    }

    /// `AᵀA` as a row-major square buffer.
    pub fn gram(&self) -> Vec<f64> {
        let p = self.ncols;
        let mut g = vec![0.0; p * p];
        for i in 0..p {
            for j in i..p {
                let v = dot(self.col(i), self.col(j));
                g[i * p + j] = v;
                g[j * p + i] = v;
            }
        }
        g
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[2]) + (acc[1] + acc[3]) + tail
}

/// Lower Cholesky factor of a row-major SPD matrix. Returns the index of the
/// first non-positive pivot on failure.
pub fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>, usize> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                let scale = a[i * n + i].abs().max(1e-300);
                if s <= 1e-12 * scale || !s.is_finite() {
                    return Err(i);
                }
                l[i * n + i] = sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves `L Lᵀ x = b` in place.
pub fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Inverse of an SPD matrix from its Cholesky factor (row-major).
pub fn cholesky_inverse(l: &[f64], n: usize) -> Vec<f64> {
    let mut inv = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        cholesky_solve(l, n, &mut e);
        for i in 0..n {
            inv[i * n + j] = e[i];
        }
    }
    inv
}

/// Sample correlation matrix of the columns (row-major, `p × p`). Columns
/// with zero variance get zero off-diagonal correlation.
pub fn correlation_matrix(x: &Matrix) -> Vec<f64> {
    let p = x.ncols();
    let n = x.nrows() as f64;
    let mut centred: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut norms = Vec::with_capacity(p);
    for j in 0..p {
        let c = x.col(j);
        let m = c.iter().sum::<f64>() / n;
        let v: Vec<f64> = c.iter().map(|a| a - m).collect();
        norms.push(sqrt(dot(&v, &v)));
        centred.push(v);
    }
    let mut r = vec![0.0; p * p];
    for i in 0..p {
        r[i * p + i] = 1.0;
        for j in i + 1..p {
            let v = if norms[i] > 0.0 && norms[j] > 0.0 {
                (dot(&centred[i], &centred[j]) / (norms[i] * norms[j])).clamp(-1.0, 1.0)
            } else {
                0.0
            };
            r[i * p + j] = v;
            r[j * p + i] = v;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_roundtrip() {
        let a = [4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0];
        let l = cholesky(&a, 3).unwrap();
        let mut b = [1.0, 2.0, 3.0];
        cholesky_solve(&l, 3, &mut b);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * b[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-12);
        }
        let inv = cholesky_inverse(&l, 3);
        let id: f64 = (0..3).map(|k| a[k] * inv[k * 3]).sum();
        assert!((id - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_reports_pivot() {
        let a = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(cholesky(&a, 2), Err(1));
    }

    #[test]
    fn correlation_of_duplicate_columns() {
        let x = Matrix::from_columns(4, &[vec![1.0, 2.0, 3.0, 5.0], vec![1.0, 2.0, 3.0, 5.0]]);
        let r = correlation_matrix(&x);
        assert!((r[1] - 1.0).abs() < 1e-12);
    }
}
