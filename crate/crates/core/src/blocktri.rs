//! Block-tridiagonal linear solve by block Gaussian elimination.
//!
//! Blocks arrive as sparse rows since every Jacobian block of the ring solver
//! is a short stencil in θ. The Schur complements fill in, so elimination
//! works on dense nalgebra matrices and LU factors.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::stencil::SparseRows;

/// `lower[k] x_k + diag[k+1] x_{k+1} + upper[k+1] x_{k+2} = rhs[k+1]`, with
/// `lower` and `upper` one shorter than `diag`.
#[derive(Debug, Clone)]
pub struct BlockTridiag {
    pub lower: Vec<SparseRows>,
    pub diag: Vec<SparseRows>,
    pub upper: Vec<SparseRows>,
}

fn densify(s: &SparseRows, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in s.rows.iter().enumerate() {
        for &(j, v) in row {
            m[(i, j)] += v;
        }
    }
    m
}

/// `s * x` for a sparse `s` and dense `x`.
fn sparse_mul(s: &SparseRows, x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(s.len(), x.ncols());
    for (i, row) in s.rows.iter().enumerate() {
        for &(j, v) in row {
            for c in 0..x.ncols() {
                out[(i, c)] += v * x[(j, c)];
            }
        }
    }
    out
}

impl BlockTridiag {
    pub fn blocks(&self) -> usize {
        self.diag.len()
    }

    /// Block size.
    pub fn width(&self) -> usize {
        self.diag.first().map_or(0, |d| d.len())
    }

    pub fn mul(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let k = self.blocks();
        (0..k)
            .map(|b| {
                let mut y = self.diag[b].apply(&x[b]);
                if b > 0 {
                    add(&mut y, &self.lower[b - 1].apply(&x[b - 1]));
                }
                if b + 1 < k {
                    add(&mut y, &self.upper[b].apply(&x[b + 1]));
                }
                y
            })
            .collect()
    }

    pub fn solve(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let k = self.blocks();
        let n = self.width();
        if rhs.len() != k || self.lower.len() + 1 != k.max(1) || self.upper.len() + 1 != k.max(1) {
            return Err(Error::InvalidProblem("block system shape mismatch".into()));
        }
        let mut cprime: Vec<DMatrix<f64>> = Vec::with_capacity(k.saturating_sub(1));
        let mut dprime: Vec<DVector<f64>> = Vec::with_capacity(k);
        for b in 0..k {
            let mut m = densify(&self.diag[b], n);
            let mut d = DVector::from_column_slice(&rhs[b]);
            if b > 0 {
                m -= sparse_mul(&self.lower[b - 1], &cprime[b - 1]);
                let prev = DMatrix::from_column_slice(n, 1, dprime[b - 1].as_slice());
                let corr = sparse_mul(&self.lower[b - 1], &prev);
                d -= corr.column(0);
            }
            let lu = m.lu();
            let singular = || Error::SingularSystem(b);
            if b + 1 < k {
                let c = lu.solve(&densify(&self.upper[b], n)).ok_or_else(singular)?;
                cprime.push(c);
            }
            let x = lu.solve(&d).ok_or_else(singular)?;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(singular());
            }
            dprime.push(x);
        }
        let mut out = vec![Vec::new(); k];
        for b in (0..k).rev() {
            let mut x = dprime[b].clone();
            if b + 1 < k {
                let next = DVector::from_column_slice(&out[b + 1]);
                x -= &cprime[b] * next;
            }
            out[b] = x.as_slice().to_vec();
        }
        Ok(out)
    }
}

fn add(y: &mut [f64], z: &[f64]) {
    for (a, b) in y.iter_mut().zip(z) {
        *a += b;
    }
}
