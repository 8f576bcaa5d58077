//! Minimal dense linear algebra for the tiny systems this crate assembles.
//!
//! Gaussian elimination with partial pivoting; a pivot smaller than
//! `1e-10 * max |diagonal|` of the original matrix flags the system as
//! singular.

use crate::error::ElasticError;

const PIVOT_RTOL: f64 = 1e-10;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DenseMat {
    n: usize,
    data: Vec<f64>,
}

impl DenseMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Largest asymmetry |A - A^T| relative to the largest entry.
    #[cfg(test)]
    pub fn asymmetry(&self) -> f64 {
        let mut max_entry: f64 = 0.0;
        let mut max_diff: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                max_entry = max_entry.max(self.at(i, j).abs());
                max_diff = max_diff.max((self.at(i, j) - self.at(j, i)).abs());
            }
        }
        if max_entry == 0.0 {
            0.0
        } else {
            max_diff / max_entry
        }
    }

    /// Solves `A x = b` for several right-hand sides at once, destroying a
    /// working copy of the matrix.
    pub fn solve_multi(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, ElasticError> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut b: Vec<Vec<f64>> = rhs.to_vec();
        let max_diag = (0..n)
            .map(|i| self.at(i, i).abs())
            .fold(0.0_f64, f64::max);
        let tol = PIVOT_RTOL * max_diag;

        for k in 0..n {
            let (pivot_row, pivot) = (k..n)
                .map(|r| (r, a[r * n + k]))
                .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
                .unwrap();
            if pivot.abs() <= tol {
                return Err(ElasticError::SingularStiffness {
                    row: k,
                    pivot: pivot.abs(),
                });
            }
            if pivot_row != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot_row * n + j);
                }
                for col in b.iter_mut() {
                    col.swap(k, pivot_row);
                }
            }
            for r in (k + 1)..n {
                let factor = a[r * n + k] / a[k * n + k];
                if factor == 0.0 {
                    continue;
                }
                for j in k..n {
                    a[r * n + j] -= factor * a[k * n + j];
                }
                for col in b.iter_mut() {
                    col[r] -= factor * col[k];
                }
            }
        }
        for col in b.iter_mut() {
            for k in (0..n).rev() {
                let mut s = col[k];
                for j in (k + 1)..n {
                    s -= a[k * n + j] * col[j];
                }
                col[k] = s / a[k * n + k];
            }
        }
        Ok(b)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, ElasticError> {
        Ok(self.solve_multi(&[rhs.to_vec()])?.pop().unwrap())
    }
}
