//! Sparse symmetric linear algebra: CSR storage and Jacobi-preconditioned
//! conjugate gradients.
//!
//! The finite element stiffness matrices assembled in this crate are
//! symmetric positive definite after Dirichlet elimination, small enough
//! (tens of thousands of unknowns) that a preconditioned Krylov solve with
//! warm starts is fast and, importantly, bit-deterministic: all loops run
//! in fixed index order on a single thread.

use crate::error::{Error, Result};

/// Compressed sparse row matrix (square, assembled once, then read-only).
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// Accumulates stiffness entries; duplicate index pairs are summed.
#[derive(Debug)]
pub struct SparseBuilder {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

/// Outcome of a conjugate gradient solve.
#[derive(Debug, Clone)]
pub struct CgSolution {
    /// Solution vector.
    pub x: Vec<f64>,
    /// Iterations consumed (0 when the initial guess already satisfies the
    /// tolerance).
    pub iterations: usize,
    /// Final relative residual `|b - Ax| / |b|`.
    pub residual: f64,
}

impl SparseBuilder {
    /// Builder for an `n` by `n` matrix.
    pub fn new(n: usize) -> Self {
        SparseBuilder { n, rows: vec![Vec::new(); n] }
    }

    /// Adds `v` to entry `(i, j)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let row = &mut self.rows[i];
        // Element stiffness rows touch at most ~20 columns; linear merge
        // keeps assembly allocation-free and deterministic.
        if let Some(slot) = row.iter_mut().find(|(c, _)| *c == j) {
            slot.1 += v;
        } else {
            row.push((j, v));
        }
    }

    /// Compresses to CSR with sorted column indices.
    pub fn build(mut self) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in &mut self.rows {
            row.sort_by_key(|(c, _)| *c);
            for (c, v) in row.iter() {
                cols.push(*c);
                vals.push(*v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { n: self.n, row_ptr, cols, vals }
    }
}

impl CsrMatrix {
    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dense matrix-vector product `y = A x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    /// Diagonal entries (zeros where a row has no diagonal entry).
    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] == i {
                    d[i] = self.vals[k];
                }
            }
        }
        d
    }

    /// Jacobi-preconditioned conjugate gradients for SPD systems.
    ///
    /// Converges to `|b - Ax| <= tol * |b|`; a zero right-hand side returns
    /// the zero solution immediately. An optional initial guess warm-starts
    /// the iteration.
    pub fn cg_solve(
        &self,
        b: &[f64],
        x0: Option<&[f64]>,
        tol: f64,
        max_iter: usize,
    ) -> Result<CgSolution> {
        let n = self.n;
        assert_eq!(b.len(), n, "rhs length mismatch");
        let bnorm = norm(b);
        if bnorm == 0.0 {
            return Ok(CgSolution { x: vec![0.0; n], iterations: 0, residual: 0.0 });
        }
        let dinv: Vec<f64> = self
            .diagonal()
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
            .collect();

        let mut x = match x0 {
            Some(g) => {
                assert_eq!(g.len(), n, "guess length mismatch");
                g.to_vec()
            }
            None => vec![0.0; n],
        };
        let mut r = vec![0.0; n];
        self.mul_vec(&x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let mut z: Vec<f64> = (0..n).map(|i| dinv[i] * r[i]).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];

        let mut res = norm(&r) / bnorm;
        if res <= tol {
            return Ok(CgSolution { x, iterations: 0, residual: res });
        }
        for it in 1..=max_iter {
            self.mul_vec(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) || !pap.is_finite() {
                return Err(Error::Solver { residual: res, iterations: it });
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            res = norm(&r) / bnorm;
            if res <= tol {
                return Ok(CgSolution { x, iterations: it, residual: res });
            }
            for i in 0..n {
                z[i] = dinv[i] * r[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::Solver { residual: res, iterations: max_iter })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1-D Dirichlet Laplacian of dimension `n`.
    fn laplacian(n: usize) -> CsrMatrix {
        let mut b = SparseBuilder::new(n);
        for i in 0..n {
            b.add(i, i, 2.0);
            if i + 1 < n {
                b.add(i, i + 1, -1.0);
                b.add(i + 1, i, -1.0);
            }
        }
        b.build()
    }

    #[test]
    fn duplicate_entries_accumulate() {
        let mut b = SparseBuilder::new(2);
        b.add(0, 0, 1.0);
        b.add(0, 0, 2.5);
        b.add(0, 1, -1.0);
        b.add(1, 1, 1.0);
        let m = b.build();
        let mut y = vec![0.0; 2];
        m.mul_vec(&[1.0, 1.0], &mut y);
        assert_eq!(y, vec![2.5, 1.0]);
    }

    #[test]
    fn cg_solves_laplacian_to_tolerance() {
        let n = 200;
        let m = laplacian(n);
        // Constant load: exact solution is a discrete parabola.
        let b = vec![1.0; n];
        let sol = m.cg_solve(&b, None, 1e-12, 10 * n).unwrap();
        let mut ax = vec![0.0; n];
        m.mul_vec(&sol.x, &mut ax);
        let err: f64 = ax.iter().zip(&b).map(|(a, bi)| (a - bi).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-12 * (n as f64).sqrt() * 2.0, "residual {err}");
    }

    #[test]
    fn warm_start_converges_immediately() {
        let n = 150;
        let m = laplacian(n);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).sin()).collect();
        let first = m.cg_solve(&b, None, 1e-13, 10 * n).unwrap();
        let again = m.cg_solve(&b, Some(&first.x), 1e-12, 10 * n).unwrap();
        assert_eq!(again.iterations, 0, "warm start should satisfy the tolerance at once");
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let m = laplacian(10);
        let sol = m.cg_solve(&[0.0; 10], None, 1e-12, 100).unwrap();
        assert_eq!(sol.x, vec![0.0; 10]);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn iteration_cap_reports_failure() {
        let m = laplacian(400);
        let b = vec![1.0; 400];
        match m.cg_solve(&b, None, 1e-14, 3) {
            Err(Error::Solver { iterations, .. }) => assert_eq!(iterations, 3),
            other => panic!("expected solver failure, got {other:?}"),
        }
    }
}
