//! Sparse complex linear algebra: CSR storage, sparse LU for the subdomain
//! and oracle solves, right-preconditioned GMRES, and the overlapping Schwarz
//! preconditioner application.

pub mod gmres;
pub mod lu;
pub mod oras;
pub mod sparse;

pub use gmres::{gmres_right, ConvergenceReport, GmresOptions, SolveStatus};
pub use lu::{lu_factor, LuFactorization};
pub use oras::{apply_oras, OrasPreconditioner};
pub use sparse::CsrMatrix;

use crate::C64;

/// A linear operator on complex vectors. Applications must be deterministic;
/// failures surface as non-finite output, which the iterative solvers detect.
pub trait LinearOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

impl LinearOp for CsrMatrix {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.matvec(x, y);
    }
}

/// Euclidean norm.
pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Conjugated inner product `<a, b> = sum conj(a_i) b_i`, the one GMRES
/// orthogonalizes with.
pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .fold(C64::new(0.0, 0.0), |acc, v| acc + v)
}
