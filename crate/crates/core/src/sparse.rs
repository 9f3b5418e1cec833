//! Minimal CSR representation used by the integrators to apply compiled
//! Hamiltonians and jump operators.
//!
//! The physical operators here are sums of a few ladder-operator products,
//! so their dense matrices carry O(total_dim) nonzeros. Applying them in CSR
//! form turns each O(d³) dense multiply in the master-equation right-hand
//! side into an O(nnz·d) one, which is what makes the stiff strongly-damped
//! runs tractable. The dense matrices remain the source of truth; this is a
//! derived, lossless view.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub(crate) struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl Csr {
    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        assert_eq!(n, m.ncols(), "CSR expects a square matrix");
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    cols.push(j);
                    vals.push(z);
                }
            }
            row_ptr.push(cols.len());
        }
        Csr {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// out = self · b, column by column (nalgebra stores column-major).
    pub fn mul_dense(&self, b: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        debug_assert_eq!(b.nrows(), self.n);
        debug_assert_eq!(out.shape(), b.shape());
        let ncols = b.ncols();
        let b_slice = b.as_slice();
        let out_slice = out.as_mut_slice();
        for c in 0..ncols {
            let b_col = &b_slice[c * self.n..(c + 1) * self.n];
            let out_col = &mut out_slice[c * self.n..(c + 1) * self.n];
            for i in 0..self.n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[k] * b_col[self.cols[k]];
                }
                out_col[i] = acc;
            }
        }
    }

    /// out = self · v.
    pub fn mul_vec(&self, v: &DVector<Complex64>, out: &mut DVector<Complex64>) {
        debug_assert_eq!(v.len(), self.n);
        let v_slice = v.as_slice();
        let out_slice = out.as_mut_slice();
        for i in 0..self.n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * v_slice[self.cols[k]];
            }
            out_slice[i] = acc;
        }
    }
}

/// out = m† (out-of-place adjoint).
pub(crate) fn adjoint_into(m: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    debug_assert_eq!(out.shape(), (m.ncols(), n));
    for i in 0..n {
        for j in 0..m.ncols() {
            out[(j, i)] = m[(i, j)].conj();
        }
    }
}
