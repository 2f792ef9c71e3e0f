//! Row-compressed complex sparse matrices.

use crate::C64;

/// Square sparse complex matrix in CSR form. Column indices are sorted and
/// unique within each row; finalized matrices carry no explicit zeros except
/// unit diagonals introduced by Dirichlet elimination.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl CsrMatrix {
    /// Zero matrix over a fixed sparsity pattern. `rows[i]` must be sorted
    /// and duplicate-free.
    pub fn from_pattern(dim: usize, rows: &[Vec<usize>]) -> Self {
        assert_eq!(rows.len(), dim);
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        let nnz: usize = rows.iter().map(|r| r.len()).sum();
        let mut cols = Vec::with_capacity(nnz);
        for r in rows {
            debug_assert!(r.windows(2).all(|w| w[0] < w[1]));
            cols.extend_from_slice(r);
            row_ptr.push(cols.len());
        }
        let vals = vec![C64::new(0.0, 0.0); cols.len()];
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Build from (row, col, value) triplets; duplicates are summed in the
    /// order given.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&t| (triplets[t].0, triplets[t].1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::new();
        let mut vals: Vec<C64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for &t in &order {
            let (r, c, v) = triplets[t];
            assert!(r < dim && c < dim);
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: (0..=dim).collect(),
            cols: (0..dim).collect(),
            vals: vec![C64::new(1.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[C64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.cols[span.clone()], &self.vals[span])
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(p) => vals[p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Add into an entry that exists in the pattern.
    #[inline]
    pub fn add_at(&mut self, r: usize, c: usize, v: C64) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        let cols = &self.cols[span.clone()];
        match cols.binary_search(&c) {
            Ok(p) => self.vals[span.start + p] += v,
            Err(_) => panic!("entry ({r}, {c}) not in assembly pattern"),
        }
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[p] * x[self.cols[p]];
            }
            y[r] = acc;
        }
    }

    pub fn matvec_alloc(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        self.matvec(x, &mut y);
        y
    }

    /// Symmetric elimination of the masked unknowns: rows and columns are
    /// zeroed, the diagonal set to one. The stored pattern is compacted so no
    /// explicit zeros remain.
    pub fn eliminate(&mut self, mask: &[bool]) {
        assert_eq!(mask.len(), self.dim);
        if !mask.iter().any(|&m| m) {
            return;
        }
        let mut row_ptr = Vec::with_capacity(self.dim + 1);
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        row_ptr.push(0);
        for r in 0..self.dim {
            if mask[r] {
                cols.push(r);
                vals.push(C64::new(1.0, 0.0));
            } else {
                for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                    let c = self.cols[p];
                    if !mask[c] {
                        cols.push(c);
                        vals.push(self.vals[p]);
                    }
                }
            }
            row_ptr.push(cols.len());
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
    }

    /// Check `A == A^T` (no conjugation) to within `tol` on every entry.
    pub fn is_complex_symmetric(&self, tol: f64) -> bool {
        for r in 0..self.dim {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[p];
                if (self.vals[p] - self.get(c, r)).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Compressed column form (col_ptr, row_idx, values), used to hand the
    /// matrix to the factorization backend.
    pub fn to_csc(&self) -> (Vec<usize>, Vec<usize>, Vec<C64>) {
        let mut col_counts = vec![0usize; self.dim + 1];
        for &c in &self.cols {
            col_counts[c + 1] += 1;
        }
        for i in 0..self.dim {
            col_counts[i + 1] += col_counts[i];
        }
        let col_ptr = col_counts.clone();
        let mut cursor = col_counts;
        let mut row_idx = vec![0usize; self.cols.len()];
        let mut vals = vec![C64::new(0.0, 0.0); self.cols.len()];
        for r in 0..self.dim {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[p];
                let dst = cursor[c];
                row_idx[dst] = r;
                vals[dst] = self.vals[p];
                cursor[c] += 1;
            }
        }
        (col_ptr, row_idx, vals)
    }

    /// Dense copy, for small oracles and tests.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut out = vec![vec![C64::new(0.0, 0.0); self.dim]; self.dim];
        for r in 0..self.dim {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[r][self.cols[p]] = self.vals[p];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let one = C64::new(1.0, 0.0);
        let a = CsrMatrix::from_triplets(
            2,
            &[(0, 0, one), (0, 0, one), (1, 0, one), (0, 1, -one)],
        );
        assert_eq!(a.get(0, 0), C64::new(2.0, 0.0));
        assert_eq!(a.get(0, 1), -one);
        assert_eq!(a.get(1, 0), one);
        assert_eq!(a.get(1, 1), C64::new(0.0, 0.0));
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn matvec_matches_dense() {
        let i = C64::new(0.0, 1.0);
        let a = CsrMatrix::from_triplets(
            2,
            &[
                (0, 0, C64::new(2.0, 0.0)),
                (0, 1, i),
                (1, 0, i),
                (1, 1, C64::new(2.0, 0.0)),
            ],
        );
        let x = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let y = a.matvec_alloc(&x);
        assert!((y[0] - (C64::new(2.0, 0.0) + i * x[1])).norm() < 1e-15);
        assert!((y[1] - (i + C64::new(0.0, 2.0))).norm() < 1e-15);
    }

    #[test]
    fn elimination_and_compaction() {
        let one = C64::new(1.0, 0.0);
        let mut a = CsrMatrix::from_triplets(
            3,
            &[
                (0, 0, one * 2.0),
                (0, 1, one),
                (1, 0, one),
                (1, 1, one * 3.0),
                (1, 2, one),
                (2, 1, one),
                (2, 2, one * 4.0),
            ],
        );
        a.eliminate(&[false, true, false]);
        assert_eq!(a.get(1, 1), one);
        assert_eq!(a.get(0, 1), C64::new(0.0, 0.0));
        assert_eq!(a.get(1, 0), C64::new(0.0, 0.0));
        assert_eq!(a.get(0, 0), one * 2.0);
        // compacted: row 1 holds only its diagonal
        assert_eq!(a.row(1).0, &[1]);
        assert!(a.is_complex_symmetric(0.0));
    }

    #[test]
    fn csc_roundtrip() {
        let i = C64::new(0.0, 1.0);
        let a = CsrMatrix::from_triplets(
            3,
            &[
                (0, 0, C64::new(1.0, 0.0)),
                (0, 2, i),
                (1, 1, C64::new(2.0, 0.0)),
                (2, 0, -i),
                (2, 2, C64::new(3.0, 0.0)),
            ],
        );
        let (col_ptr, row_idx, vals) = a.to_csc();
        assert_eq!(col_ptr, vec![0, 2, 3, 5]);
        assert_eq!(row_idx, vec![0, 2, 1, 0, 2]);
        assert_eq!(vals[0], C64::new(1.0, 0.0));
        assert_eq!(vals[1], -i);
    }
}
