//! Small dense matrix helpers.
//!
//! Everything in this crate works with tangent spaces of dimension n <= 10 or
//! so, therefore matrices are stored as flat row-major `Vec<f64>` and all
//! algorithms are the textbook O(n^3) ones. Summation order is fixed so that
//! repeated runs produce bit-identical results.

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                context: "square matrix storage",
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = 0.0;
            for j in 0..self.n {
                acc += self[(i, j)] * x[j];
            }
            out[i] = acc;
        }
        out
    }

    /// x^T A y with a fixed summation order.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for j in 0..self.n {
                row += self[(i, j)] * y[j];
            }
            acc += x[i] * row;
        }
        acc
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = 0.5 * (self[(i, j)] + self[(j, i)]);
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |w, (a, b)| w.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |w, a| w.max(a.abs()))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| c * a).collect(),
        }
    }

    /// Lower-triangular Cholesky factor. Fails when a pivot drops below
    /// `pivot_tol`, which is how positive definiteness is decided everywhere
    /// in this crate.
    pub fn cholesky(&self, pivot_tol: f64) -> Result<SquareMatrix> {
        let n = self.n;
        let mut l = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = self[(i, j)];
                for k in 0..j {
                    acc -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if acc <= pivot_tol {
                        return Err(Error::InvalidInput(format!(
                            "matrix is not positive definite (pivot {acc:.3e} at row {i})"
                        )));
                    }
                    l[(i, j)] = acc.sqrt();
                } else {
                    l[(i, j)] = acc / l[(j, j)];
                }
            }
        }
        Ok(l)
    }

    /// Solves L^T x = g for lower-triangular self (back substitution).
    pub fn solve_transposed_lower(&self, g: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = g[i];
            for j in (i + 1)..n {
                acc -= self[(j, i)] * x[j];
            }
            x[i] = acc / self[(i, i)];
        }
        x
    }
}

impl std::ops::Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        let n = self.n;
        &mut self.data[i * n + j]
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        acc += x[i] * y[i];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_recovers_spd_factor() {
        let a = SquareMatrix::from_rows(2, vec![4.0, 2.0, 2.0, 3.0]).unwrap();
        let l = a.cholesky(1e-12).unwrap();
        // L L^T == A
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += l[(i, k)] * l[(j, k)];
                }
                assert!((acc - a[(i, j)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = SquareMatrix::from_rows(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(a.cholesky(1e-12).is_err());
    }

    #[test]
    fn transposed_lower_solve() {
        let a = SquareMatrix::from_rows(2, vec![2.0, 0.0, 1.0, 3.0]).unwrap();
        let x = a.solve_transposed_lower(&[4.0, 6.0]);
        // L^T x = g
        assert!((2.0 * x[0] + 1.0 * x[1] - 4.0).abs() < 1e-14);
        assert!((3.0 * x[1] - 6.0).abs() < 1e-14);
    }

    #[test]
    fn bilinear_matches_matvec() {
        let a = SquareMatrix::from_rows(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let x = [1.0, -1.0];
        let y = [0.5, 2.0];
        let ay = a.matvec(&y);
        assert!((a.bilinear(&x, &y) - (x[0] * ay[0] + x[1] * ay[1])).abs() < 1e-14);
    }
}
