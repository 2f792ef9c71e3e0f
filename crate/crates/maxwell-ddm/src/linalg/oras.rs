//! Application of the restricted additive Schwarz preconditioner
//! `M^-1 r = sum_s R_s^T D_s A_s^-1 R_s r`.
//!
//! Local solves fan out across a worker pool; the weighted scatter-add runs
//! afterwards in ascending subdomain order, so the result is identical for
//! any worker count.

use crate::ddm::SubdomainProblem;
use crate::linalg::LinearOp;
use crate::{Error, C64};
use rayon::prelude::*;

/// Preconditioner over a set of factorized subdomain problems.
pub struct OrasPreconditioner<'a> {
    subdomains: &'a [SubdomainProblem],
    dim: usize,
}

impl<'a> OrasPreconditioner<'a> {
    pub fn new(dim: usize, subdomains: &'a [SubdomainProblem]) -> Self {
        assert!(!subdomains.is_empty());
        Self { subdomains, dim }
    }

    fn solve_all(&self, r: &[C64]) -> Vec<Vec<C64>> {
        self.subdomains
            .par_iter()
            .map(|sp| {
                let local: Vec<C64> = sp.restriction.iter().map(|&g| r[g]).collect();
                sp.factorization.solve_unchecked(&local)
            })
            .collect()
    }

    fn reduce(&self, locals: Vec<Vec<C64>>, out: &mut [C64]) {
        out.fill(C64::new(0.0, 0.0));
        for (sp, x) in self.subdomains.iter().zip(locals) {
            for (l, &g) in sp.restriction.iter().enumerate() {
                if sp.weights[l] != 0.0 {
                    out[g] += x[l] * sp.weights[l];
                }
            }
        }
    }
}

impl LinearOp for OrasPreconditioner<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    /// Non-finite local solves propagate into the output; the Krylov solver
    /// reports them as a breakdown.
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let locals = self.solve_all(x);
        self.reduce(locals, y);
    }
}

/// Checked preconditioner application; local breakdowns carry the subdomain
/// index.
pub fn apply_oras(subdomains: &[SubdomainProblem], r: &[C64]) -> Result<Vec<C64>, Error> {
    let pre = OrasPreconditioner::new(r.len(), subdomains);
    let locals: Vec<(usize, Result<Vec<C64>, Error>)> = subdomains
        .par_iter()
        .map(|sp| {
            let local: Vec<C64> = sp.restriction.iter().map(|&g| r[g]).collect();
            (sp.index, sp.factorization.solve(&local))
        })
        .collect();
    let mut resolved = Vec::with_capacity(locals.len());
    for (index, res) in locals {
        match res {
            Ok(v) => resolved.push(v),
            Err(e) => {
                return Err(Error::Breakdown(format!("subdomain {index}: {e}")));
            }
        }
    }
    let mut out = vec![C64::new(0.0, 0.0); r.len()];
    pre.reduce(resolved, &mut out);
    Ok(out)
}
