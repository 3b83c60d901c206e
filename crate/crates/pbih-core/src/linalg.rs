//! Small dense matrices and vector helpers. Hypersurface charts are
//! low-dimensional (m is 1, 2, or 3 in practice), so a simple row-major
//! matrix with partial-pivot elimination covers every need here.

use alloc::vec;
use alloc::vec::Vec;

use crate::fmath;

#[derive(Clone, Debug, PartialEq)]
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
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.at(i, i)).sum()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self.at(i, k) * other.at(k, j)).sum()
        })
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| s * self.at(i, j))
    }

    /// Quadratic form `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += v[i] * self.at(i, j) * v[j];
            }
        }
        acc
    }

    /// Inverse by Gauss-Jordan with partial pivoting; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        debug_assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let mut pivot = col;
            for r in col + 1..n {
                if fmath::abs(a.at(r, col)) > fmath::abs(a.at(pivot, col)) {
                    pivot = r;
                }
            }
            let p = a.at(pivot, col);
            if p == 0.0 {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.at(col, j), a.at(pivot, j));
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (inv.at(col, j), inv.at(pivot, j));
                    inv.set(col, j, y);
                    inv.set(pivot, j, x);
                }
            }
            let p = a.at(col, col);
            for j in 0..n {
                a.set(col, j, a.at(col, j) / p);
                inv.set(col, j, inv.at(col, j) / p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.at(r, col);
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.at(r, j) - factor * a.at(col, j));
                    inv.set(r, j, inv.at(r, j) - factor * inv.at(col, j));
                }
            }
        }
        Some(inv)
    }

    /// Determinant by LU elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        debug_assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut pivot = col;
            for r in col + 1..n {
                if fmath::abs(a.at(r, col)) > fmath::abs(a.at(pivot, col)) {
                    pivot = r;
                }
            }
            if a.at(pivot, col) == 0.0 {
                return 0.0;
            }
            if pivot != col {
                det = -det;
                for j in 0..n {
                    let (x, y) = (a.at(col, j), a.at(pivot, j));
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                }
            }
            let p = a.at(col, col);
            det *= p;
            for r in col + 1..n {
                let factor = a.at(r, col) / p;
                for j in col..n {
                    a.set(r, j, a.at(r, j) - factor * a.at(col, j));
                }
            }
        }
        det
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
    pub fn sym_eigenvalues(&self) -> Vec<f64> {
        debug_assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        for _ in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    off += a.at(i, j) * a.at(i, j);
                }
            }
            let scale: f64 = (0..n).map(|i| a.at(i, i) * a.at(i, i)).sum::<f64>() + off;
            if off <= 1e-30 * (1.0 + scale) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a.at(p, q);
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                    let t = {
                        let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                        s / (fmath::abs(theta) + fmath::sqrt(theta * theta + 1.0))
                    };
                    let c = 1.0 / fmath::sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.at(k, p);
                        let akq = a.at(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.at(p, k);
                        let aqk = a.at(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                }
            }
        }
        let mut eigs: Vec<f64> = (0..n).map(|i| a.at(i, i)).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eigs
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    fmath::sqrt(dot(v, v))
}

pub fn scale(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let m = Matrix::from_fn(2, 2, |i, j| [[4.0, 1.0], [2.0, 3.0]][i][j]);
        assert!((m.det() - 10.0).abs() < 1e-14);
        let inv = m.inverse().unwrap();
        let id = m.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id.at(i, j) - want).abs() < 1e-14);
            }
        }
        assert!(Matrix::zeros(2, 2).inverse().is_none());
    }

    #[test]
    fn jacobi_eigenvalues() {
        let m = Matrix::from_fn(3, 3, |i, j| {
            [[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]][i][j]
        });
        let eigs = m.sym_eigenvalues();
        let sqrt2 = 2.0f64.sqrt();
        let want = [2.0 - sqrt2, 2.0, 2.0 + sqrt2];
        for (e, w) in eigs.iter().zip(want.iter()) {
            assert!((e - w).abs() < 1e-12, "{e} vs {w}");
        }
    }
}
