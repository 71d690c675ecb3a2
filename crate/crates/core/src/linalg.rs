//! Small dense linear algebra: row-major matrices, Householder least squares
//! and Cholesky factorization. Sized for designs with a handful of columns.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
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

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a `T x q` matrix from `q` equally long columns.
    pub fn from_columns(columns: &[&[f64]]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.len());
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::LengthMismatch {
                    expected: rows,
                    got: c.len(),
                });
            }
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    /// Replaces the matrix by `(A + A') / 2`.
    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| f64::max(m, libm::fabs(*v)))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::LengthMismatch {
            expected: n,
            got: a.cols(),
        });
    }
    let scale = (0..n).fold(0.0, |m, i| f64::max(m, libm::fabs(a[(i, i)])));
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > scale * 1e-14) {
            return Err(Error::RankDeficient);
        }
        let d = libm::sqrt(d);
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Inverse of a symmetric positive definite matrix.
pub fn spd_inverse(a: &Matrix) -> Result<Matrix> {
    let l = cholesky(a)?;
    let n = l.rows();
    // invert L by forward substitution, then A^-1 = L^-T L^-1
    let mut linv = Matrix::zeros(n, n);
    for j in 0..n {
        linv[(j, j)] = 1.0 / l[(j, j)];
        for i in (j + 1)..n {
            let mut s = 0.0;
            for k in j..i {
                s -= l[(i, k)] * linv[(k, j)];
            }
            linv[(i, j)] = s / l[(i, i)];
        }
    }
    let mut inv = linv.transpose().matmul(&linv);
    inv.symmetrize();
    Ok(inv)
}

/// Least-squares fit by Householder QR.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `(X'X)^-1`, computed from the triangular factor.
    pub xtx_inverse: Matrix,
}

pub fn least_squares(x: &Matrix, y: &[f64]) -> Result<LeastSquares> {
    let (n, p) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if n < p || p == 0 {
        return Err(Error::TooShort { needed: p.max(1), got: n });
    }
    let mut a = x.clone();
    let mut qty = y.to_vec();
    let mut col_norm = 0.0f64;
    for j in 0..p {
        col_norm = col_norm.max(libm::sqrt((0..n).map(|i| x[(i, j)] * x[(i, j)]).sum()));
    }
    for k in 0..p {
        let norm = libm::sqrt((k..n).map(|i| a[(i, k)] * a[(i, k)]).sum());
        if !(norm > col_norm * 1e-12) {
            return Err(Error::RankDeficient);
        }
        let alpha = if a[(k, k)] > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in place below the diagonal
        a[(k, k)] -= alpha;
        let vnorm2: f64 = (k..n).map(|i| a[(i, k)] * a[(i, k)]).sum();
        for j in (k + 1)..p {
            let s: f64 = (k..n).map(|i| a[(i, k)] * a[(i, j)]).sum();
            let f = 2.0 * s / vnorm2;
            for i in k..n {
                a[(i, j)] -= f * a[(i, k)];
            }
        }
        let s: f64 = (k..n).map(|i| a[(i, k)] * qty[i]).sum();
        let f = 2.0 * s / vnorm2;
        for i in k..n {
            qty[i] -= f * a[(i, k)];
        }
        a[(k, k)] = alpha;
    }
    // R is the upper triangle of `a`
    let mut coefficients = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = qty[i];
        for j in (i + 1)..p {
            s -= a[(i, j)] * coefficients[j];
        }
        coefficients[i] = s / a[(i, i)];
    }
    let mut rinv = Matrix::zeros(p, p);
    for j in 0..p {
        rinv[(j, j)] = 1.0 / a[(j, j)];
        for i in (0..j).rev() {
            let mut s = 0.0;
            for k in (i + 1)..=j {
                s -= a[(i, k)] * rinv[(k, j)];
            }
            rinv[(i, j)] = s / a[(i, i)];
        }
    }
    let mut xtx_inverse = rinv.matmul(&rinv.transpose());
    xtx_inverse.symmetrize();
    let fitted = x.matvec(&coefficients);
    let residuals = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    Ok(LeastSquares {
        coefficients,
        residuals,
        xtx_inverse,
    })
}
