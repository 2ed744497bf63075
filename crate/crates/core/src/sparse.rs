//! Compressed sparse row storage and a Jacobi-preconditioned conjugate
//! gradient solver.
//!
//! Assembly sorts triplets with a stable sort before merging duplicates, so
//! the summation order (and therefore every bit of the result) only depends
//! on the order in which triplets were pushed.

use num_traits::Zero;
use std::ops::AddAssign;

use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Copy + Zero + AddAssign> CsrMatrix<T> {
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, T)>,
    ) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n_rows && c < n_cols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().expect("merged entry") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl<T> CsrMatrix<T> {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates over `(column, value)` pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(&self.values[span])
    }
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn get(&self, r: usize, c: usize) -> T {
        self.row(r)
            .find(|&(j, _)| j == c)
            .map(|(_, v)| *v)
            .unwrap_or_else(T::zero)
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n_cols, "dimension mismatch in mul_vec");
        (0..self.n_rows)
            .map(|r| {
                let mut acc = T::zero();
                for (c, v) in self.row(r) {
                    acc += *v * x[c];
                }
                acc
            })
            .collect()
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    /// Restriction to the given rows and columns (both given as index lists
    /// into the original matrix).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut triplets = Vec::new();
        for (new_r, &old_r) in rows.iter().enumerate() {
            for (c, v) in self.row(old_r) {
                let nc = col_map[c];
                if nc != usize::MAX {
                    triplets.push((new_r, nc, *v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), triplets)
    }

    /// Largest absolute asymmetry `|a_ij - a_ji|`.
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                worst = worst.max((*v - self.get(c, r)).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats<T> {
    pub iterations: usize,
    pub relative_residual: T,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("conjugate gradient stalled after {iterations} iterations at relative residual {relative_residual:e}")]
pub struct NotConverged {
    pub iterations: usize,
    pub relative_residual: f64,
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Jacobi-preconditioned CG for a symmetric positive (semi)definite matrix.
/// Stops once `||b - A x|| <= tol * ||b||`. Works on singular systems whose
/// right-hand side lies in the range of `A`.
pub fn pcg<T: Scalar>(
    a: &CsrMatrix<T>,
    b: &[T],
    tol: T,
    max_iter: usize,
) -> Result<(Vec<T>, SolveStats<T>), NotConverged> {
    let n = b.len();
    let mut x = vec![T::zero(); n];
    let b_norm = dot(b, b).sqrt();
    if b_norm == T::zero() {
        return Ok((
            x,
            SolveStats {
                iterations: 0,
                relative_residual: T::zero(),
            },
        ));
    }
    let inv_diag: Vec<T> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > T::zero() { T::one() / d } else { T::one() })
        .collect();
    let mut r = b.to_vec();
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(r, d)| *r * *d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut rel = T::one();
    for it in 0..max_iter {
        let ap = a.mul_vec(&p);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = dot(&r, &r).sqrt() / b_norm;
        if rel <= tol {
            return Ok((
                x,
                SolveStats {
                    iterations: it + 1,
                    relative_residual: rel,
                },
            ));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(NotConverged {
        iterations: max_iter,
        relative_residual: rel.to_f64().unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, t)
    }

    #[test]
    fn duplicates_are_merged() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 0, 2.0), (0, 0, 0.5)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 0), 1.5);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(1, 1), 0.0);
    }

    #[test]
    fn cg_solves_tridiagonal() {
        let a = laplacian_1d(50);
        let x_true: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&x_true);
        let (x, stats) = pcg(&a, &b, 1e-12, 500).unwrap();
        assert!(stats.relative_residual <= 1e-12);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn submatrix_keeps_selected_block() {
        let a = laplacian_1d(4);
        let s = a.submatrix(&[1, 2], &[1, 2]);
        assert_eq!(s.get(0, 0), 2.0);
        assert_eq!(s.get(0, 1), -1.0);
        assert_eq!(s.n_rows(), 2);
    }

    #[test]
    fn cg_reports_stall() {
        let a = laplacian_1d(200);
        let b = vec![1.0; 200];
        assert!(pcg(&a, &b, 1e-14, 3).is_err());
    }
}
