//! Sparse direct factorization for subdomain and oracle solves.
//!
//! Backed by faer's supernodal sparse LU with partial pivoting and its
//! built-in fill-reducing column ordering. faer is pinned to sequential
//! execution here; parallelism lives one level up, across subdomains, which
//! keeps factorizations and solves bit-reproducible for any worker count.

use crate::linalg::sparse::CsrMatrix;
use crate::{Error, C64};
use std::sync::Once;

use faer::sparse::{SparseColMat, SymbolicSparseColMat};

static PIN_SEQUENTIAL: Once = Once::new();

fn pin_backend_sequential() {
    PIN_SEQUENTIAL.call_once(|| {
        faer::set_global_parallelism(faer::Par::Seq);
    });
}

/// Opaque factorization handle; immutable and shareable across threads.
pub struct LuFactorization {
    lu: faer::sparse::linalg::solvers::Lu<usize, faer::c64>,
    dim: usize,
}

impl std::fmt::Debug for LuFactorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LuFactorization").field("dim", &self.dim).finish()
    }
}

/// Factorize a square sparse complex matrix.
///
/// Structural or numerical singularity is reported as a breakdown error.
pub fn lu_factor(a: &CsrMatrix) -> Result<LuFactorization, Error> {
    pin_backend_sequential();
    let n = a.dim();
    let (col_ptr, row_idx, vals) = a.to_csc();
    let values: Vec<faer::c64> = vals.iter().map(|v| faer::c64::new(v.re, v.im)).collect();
    let symbolic = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
    let mat = SparseColMat::new(symbolic, values);
    let lu = mat
        .sp_lu()
        .map_err(|e| Error::Breakdown(format!("sparse LU failed: {e:?}")))?;
    Ok(LuFactorization { lu, dim: n })
}

impl LuFactorization {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Forward/backward substitution. Non-finite output (an exact zero pivot
    /// survived factorization) is reported with the first offending index.
    pub fn solve(&self, rhs: &[C64]) -> Result<Vec<C64>, Error> {
        let x = self.solve_unchecked(rhs);
        if let Some(bad) = x.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Breakdown(format!(
                "triangular solve produced a non-finite value at unknown {bad} (zero pivot)"
            )));
        }
        Ok(x)
    }

    /// Substitution without the finiteness check; NaN/Inf propagate to the
    /// caller (the iterative solver treats them as a breakdown).
    pub fn solve_unchecked(&self, rhs: &[C64]) -> Vec<C64> {
        assert_eq!(rhs.len(), self.dim);
        use faer::linalg::solvers::Solve;
        let b = faer::Mat::<faer::c64>::from_fn(self.dim, 1, |i, _| {
            faer::c64::new(rhs[i].re, rhs[i].im)
        });
        let x = self.lu.solve(&b);
        (0..self.dim)
            .map(|i| {
                let v = x[(i, 0)];
                C64::new(v.re, v.im)
            })
            .collect()
    }
}

/// Convenience: factor-and-solve in one call.
pub fn lu_solve(a: &CsrMatrix, rhs: &[C64]) -> Result<Vec<C64>, Error> {
    lu_factor(a)?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm;

    #[test]
    fn identity_solve() {
        let a = CsrMatrix::identity(5);
        let f = lu_factor(&a).unwrap();
        let rhs: Vec<C64> = (0..5).map(|i| C64::new(i as f64, -(i as f64))).collect();
        let x = f.solve(&rhs).unwrap();
        assert_eq!(x, rhs);
    }

    #[test]
    fn two_by_two_closed_form() {
        // A = [[2, i],[i, 2]], b = [1, 0]: det = 5, x = [2/5, -i/5]
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
        let x = lu_solve(&a, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert!((x[0] - C64::new(0.4, 0.0)).norm() < 1e-14);
        assert!((x[1] - C64::new(0.0, -0.2)).norm() < 1e-14);
    }

    #[test]
    fn structurally_singular_is_breakdown() {
        // empty column
        let a = CsrMatrix::from_triplets(2, &[(0, 0, C64::new(1.0, 0.0))]);
        assert!(matches!(lu_factor(&a), Err(Error::Breakdown(_))));
    }

    #[test]
    fn residual_on_assembled_system() {
        // random 54-dof assembled system, checked by the residual
        use crate::assembly::{assemble_global, assemble_rhs_random};
        use crate::grid::{build_grid, DiscretizationSpec, GlobalBc};
        use crate::physics::PhysicsSpec;
        let phys = PhysicsSpec::new(0.5, 1.0);
        let disc = DiscretizationSpec {
            domain_lengths: [0.8, 0.8, 0.8],
            n_lambda: 5.0,
            l_pml_lambda: 0.0,
            l_pmli_layers: 0,
            overlap_layers: 1,
        };
        let mesh = build_grid(&disc, &phys, None, GlobalBc::Impedance).unwrap();
        assert_eq!(mesh.edge_count(), 54);
        let sys = assemble_global(&mesh, &phys, Default::default(), GlobalBc::Impedance).unwrap();
        let b = assemble_rhs_random(&mesh, 3);
        let x = lu_solve(&sys.matrix, &b).unwrap();
        let mut r = sys.matrix.matvec_alloc(&x);
        for (ri, bi) in r.iter_mut().zip(&b) {
            *ri -= *bi;
        }
        assert!(norm(&r) / norm(&b) < 1e-10);
    }
}
