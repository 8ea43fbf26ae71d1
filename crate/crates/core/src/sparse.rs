//! Compressed sparse row storage for complex Hermitian operators.
//!
//! The solver stack only ever needs matrix-vector products, entry lookup,
//! and cheap spectral bounds, so the type stays deliberately small. Rows
//! are immutable after construction; `matvec` distributes rows across the
//! rayon pool for large operators, which is bitwise deterministic because
//! every output element is reduced sequentially within its own row.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("entry ({row}, {col}) outside matrix of dimension {dim}")]
    IndexOutOfBounds { row: usize, col: usize, dim: usize },
    #[error("vector length {got} does not match matrix dimension {dim}")]
    DimensionMismatch { got: usize, dim: usize },
    #[error("non-finite value at entry ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("dense conversion refused: dimension {dim} exceeds cap {cap}")]
    DenseTooLarge { dim: usize, cap: usize },
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
}

/// Row-parallel matvec pays off only once rows outnumber scheduling cost.
const PAR_DIM_THRESHOLD: usize = 8192;
const PAR_ROW_CHUNK: usize = 512;

/// Largest dimension `to_dense` will materialize (a 4096² complex matrix
/// is 256 MiB; anything bigger is a caller bug).
pub const DENSE_CAP: usize = 4096;

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets. Duplicates are summed.
    /// Entries summing to exact zero are kept; sparsity is the caller's
    /// block structure, not a numeric threshold.
    pub fn from_triplets(
        dim: usize,
        mut triplets: Vec<(usize, usize, Complex64)>,
    ) -> Result<Self, SparseError> {
        if dim == 0 {
            return Err(SparseError::EmptyMatrix);
        }
        for &(r, c, v) in &triplets {
            if r >= dim || c >= dim {
                return Err(SparseError::IndexOutOfBounds { row: r, col: c, dim });
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(SparseError::NonFiniteEntry { row: r, col: c });
            }
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut cur_row = 0usize;
        for (r, c, v) in triplets {
            while cur_row < r {
                row_ptr.push(col_idx.len());
                cur_row += 1;
            }
            let row_start = *row_ptr.last().expect("row_ptr nonempty");
            if col_idx.len() > row_start && *col_idx.last().expect("nonempty") == c {
                *values.last_mut().expect("col/value lockstep") += v;
                continue;
            }
            col_idx.push(c);
            values.push(v);
        }
        while cur_row < dim {
            row_ptr.push(col_idx.len());
            cur_row += 1;
        }
        debug_assert_eq!(row_ptr.len(), dim + 1);
        Ok(CsrMatrix { dim, row_ptr, col_idx, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored value at (row, col); structural zeros read as 0.
    pub fn entry(&self, row: usize, col: usize) -> Result<Complex64, SparseError> {
        if row >= self.dim || col >= self.dim {
            return Err(SparseError::IndexOutOfBounds { row, col, dim: self.dim });
        }
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        Ok(match self.col_idx[lo..hi].binary_search(&col) {
            Ok(p) => self.values[lo + p],
            Err(_) => Complex64::new(0.0, 0.0),
        })
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (r, self.col_idx[p], self.values[p]))
        })
    }

    #[inline]
    fn row_dot(&self, row: usize, v: &[Complex64]) -> Complex64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        let mut acc = Complex64::new(0.0, 0.0);
        for p in lo..hi {
            acc += self.values[p] * v[self.col_idx[p]];
        }
        acc
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>, SparseError> {
        if v.len() != self.dim {
            return Err(SparseError::DimensionMismatch { got: v.len(), dim: self.dim });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_into(v, &mut out);
        Ok(out)
    }

    /// Hot-path product; lengths are the caller's invariant.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(v.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        if self.dim >= PAR_DIM_THRESHOLD && rayon::current_num_threads() > 1 {
            out.par_chunks_mut(PAR_ROW_CHUNK).enumerate().for_each(|(chunk, slot)| {
                let base = chunk * PAR_ROW_CHUNK;
                for (i, o) in slot.iter_mut().enumerate() {
                    *o = self.row_dot(base + i, v);
                }
            });
        } else {
            for (i, o) in out.iter_mut().enumerate() {
                *o = self.row_dot(i, v);
            }
        }
    }

    /// Largest entrywise defect |A_ij - conj(A_ji)|. Zero means exactly
    /// Hermitian storage, which device assembly guarantees by construction.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (r, c, v) in self.iter_entries() {
            let t = self.entry(c, r).expect("in-range by construction");
            worst = worst.max((v - t.conj()).norm());
        }
        worst
    }

    /// Gershgorin interval (lo, hi) for a Hermitian matrix: every
    /// eigenvalue lies in the union of row discs around the diagonal.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.dim {
            let mut diag = 0.0f64;
            let mut radius = 0.0f64;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.col_idx[p] == r {
                    diag = self.values[p].re;
                } else {
                    radius += self.values[p].norm();
                }
            }
            lo = lo.min(diag - radius);
            hi = hi.max(diag + radius);
        }
        if self.nnz() == 0 {
            // all-zero operator still has spectrum {0}
            return (0.0, 0.0);
        }
        (lo, hi)
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>, SparseError> {
        if self.dim > DENSE_CAP {
            return Err(SparseError::DenseTooLarge { dim: self.dim, cap: DENSE_CAP });
        }
        let mut m = DMatrix::from_element(self.dim, self.dim, Complex64::new(0.0, 0.0));
        for (r, c, v) in self.iter_entries() {
            m[(r, c)] += v;
        }
        Ok(m)
    }
}
