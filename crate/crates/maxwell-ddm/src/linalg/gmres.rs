//! Right-preconditioned GMRES.
//!
//! Solves `A M^-1 y = b`, `u = M^-1 y`, so the iteration's residual is the
//! true residual of the original system regardless of the preconditioner.
//! The reported history is that relative true residual, one entry per
//! iteration plus the initial one; it is nonincreasing by construction of
//! the Givens recurrence.
//!
//! Memory holds only the Arnoldi basis; the preconditioner is applied once
//! per iteration and once more per restart cycle to map the correction back,
//! using linearity of `M^-1`.

use crate::linalg::{dot, norm, LinearOp};
use crate::C64;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Breakdown,
}

/// Convergence record of one solve.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// Arnoldi steps performed.
    pub iterations: usize,
    /// Relative true residuals; `iterations + 1` entries including the
    /// initial residual.
    pub residual_history: Vec<f64>,
    pub status: SolveStatus,
    /// Seconds spent in the solve.
    pub wall_time: f64,
    /// Explicitly recomputed `||b - A x|| / ||b||` of the returned iterate.
    pub final_residual: f64,
}

#[derive(Debug, Clone)]
pub struct GmresOptions {
    /// Relative residual target.
    pub tol: f64,
    /// Iteration cap across restart cycles.
    pub max_iter: usize,
    /// Krylov space dimension per cycle; `None` runs full GMRES to the cap.
    pub restart: Option<usize>,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 200,
            restart: None,
        }
    }
}

/// Right-preconditioned GMRES with zero initial guess.
///
/// `m` applies the preconditioner `M^-1`; `None` means unpreconditioned.
pub fn gmres_right(
    a: &dyn LinearOp,
    m: Option<&dyn LinearOp>,
    b: &[C64],
    opts: &GmresOptions,
) -> (Vec<C64>, ConvergenceReport) {
    let start = Instant::now();
    let n = a.dim();
    assert_eq!(b.len(), n, "right-hand side dimension mismatch");
    assert!(opts.tol > 0.0 && opts.max_iter >= 1);
    let zero = C64::new(0.0, 0.0);

    let b_norm = norm(b);
    if b_norm == 0.0 {
        return (
            vec![zero; n],
            ConvergenceReport {
                iterations: 0,
                residual_history: vec![0.0],
                status: SolveStatus::Converged,
                wall_time: start.elapsed().as_secs_f64(),
                final_residual: 0.0,
            },
        );
    }

    let apply_m = |x: &[C64], y: &mut [C64]| match m {
        Some(op) => op.apply(x, y),
        None => y.copy_from_slice(x),
    };

    let mut x = vec![zero; n];
    let mut history = Vec::with_capacity(opts.max_iter + 1);
    let mut total_iters = 0usize;
    let mut status = SolveStatus::MaxIter;

    let mut scratch_z = vec![zero; n];
    let mut w = vec![zero; n];

    'cycles: loop {
        // residual of the current iterate (b on the first pass)
        let mut r = vec![zero; n];
        a.apply(&x, &mut w);
        for i in 0..n {
            r[i] = b[i] - w[i];
        }
        let beta = norm(&r);
        let rel = beta / b_norm;
        if history.is_empty() {
            history.push(rel);
        }
        if !rel.is_finite() {
            status = SolveStatus::Breakdown;
            break 'cycles;
        }
        if rel <= opts.tol {
            status = SolveStatus::Converged;
            break 'cycles;
        }
        if total_iters >= opts.max_iter {
            status = SolveStatus::MaxIter;
            break 'cycles;
        }

        let cycle_dim = opts
            .restart
            .unwrap_or(opts.max_iter)
            .min(opts.max_iter - total_iters)
            .min(n);

        // Arnoldi basis and the Givens-rotated Hessenberg columns
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cycle_dim + 1);
        let inv_beta = 1.0 / beta;
        basis.push(r.iter().map(|v| v * inv_beta).collect());
        let mut hcols: Vec<Vec<C64>> = Vec::with_capacity(cycle_dim);
        let mut cs: Vec<C64> = Vec::with_capacity(cycle_dim);
        let mut sn: Vec<C64> = Vec::with_capacity(cycle_dim);
        let mut g = vec![zero; cycle_dim + 1];
        g[0] = C64::new(beta, 0.0);

        let mut k_done = 0usize;
        let mut cycle_converged = false;
        let mut lucky = false;

        for k in 0..cycle_dim {
            total_iters += 1;

            apply_m(&basis[k], &mut scratch_z);
            a.apply(&scratch_z, &mut w);

            // modified Gram-Schmidt
            let mut hcol = vec![zero; k + 2];
            for (j, vj) in basis.iter().enumerate() {
                let hij = dot(vj, &w);
                hcol[j] = hij;
                for i in 0..n {
                    w[i] -= hij * vj[i];
                }
            }
            let w_norm = norm(&w);
            hcol[k + 1] = C64::new(w_norm, 0.0);

            if !w_norm.is_finite() {
                status = SolveStatus::Breakdown;
                k_done = k; // discard the failed column
                history.push(f64::NAN);
                break;
            }

            let happy = w_norm <= 1e-14 * beta;
            if !happy {
                let inv_w = 1.0 / w_norm;
                basis.push(w.iter().map(|v| v * inv_w).collect());
            }

            // previously computed rotations
            for j in 0..k {
                let t = cs[j].conj() * hcol[j] + sn[j].conj() * hcol[j + 1];
                hcol[j + 1] = -sn[j] * hcol[j] + cs[j] * hcol[j + 1];
                hcol[j] = t;
            }
            // new rotation annihilating the subdiagonal
            let (c, s) = givens(hcol[k], hcol[k + 1]);
            let t = c.conj() * hcol[k] + s.conj() * hcol[k + 1];
            hcol[k] = t;
            hcol[k + 1] = zero;
            let tg = c.conj() * g[k] + s.conj() * g[k + 1];
            g[k + 1] = -s * g[k] + c * g[k + 1];
            g[k] = tg;
            cs.push(c);
            sn.push(s);
            hcols.push(hcol);
            k_done = k + 1;

            let est = g[k + 1].norm() / b_norm;
            history.push(est);
            if !est.is_finite() {
                status = SolveStatus::Breakdown;
                break;
            }
            if est <= opts.tol {
                cycle_converged = true;
                break;
            }
            if happy {
                // invariant subspace reached; the small solve is exact
                lucky = true;
                break;
            }
        }

        // y from the triangularized least-squares system
        let mut y = vec![zero; k_done];
        for i in (0..k_done).rev() {
            let mut sum = g[i];
            for j in (i + 1)..k_done {
                sum -= hcols[j][i] * y[j];
            }
            if hcols[i][i].norm() > 1e-300 {
                y[i] = sum / hcols[i][i];
            }
        }
        // x += M^-1 (V y), one preconditioner application by linearity
        let mut vy = vec![zero; n];
        for (j, yj) in y.iter().enumerate() {
            let vj = &basis[j];
            for i in 0..n {
                vy[i] += vj[i] * yj;
            }
        }
        apply_m(&vy, &mut scratch_z);
        for i in 0..n {
            x[i] += scratch_z[i];
        }

        if status == SolveStatus::Breakdown {
            break 'cycles;
        }
        if cycle_converged || lucky {
            status = SolveStatus::Converged;
            break 'cycles;
        }
        if total_iters >= opts.max_iter {
            status = SolveStatus::MaxIter;
            break 'cycles;
        }
        // otherwise restart
    }

    // explicit true residual of the returned iterate
    a.apply(&x, &mut w);
    let mut rnorm2 = 0.0;
    for i in 0..n {
        rnorm2 += (b[i] - w[i]).norm_sqr();
    }
    let final_residual = rnorm2.sqrt() / b_norm;
    if status == SolveStatus::Converged && !final_residual.is_finite() {
        status = SolveStatus::Breakdown;
    }

    let report = ConvergenceReport {
        iterations: total_iters,
        residual_history: history,
        status,
        wall_time: start.elapsed().as_secs_f64(),
        final_residual,
    };
    (x, report)
}

fn givens(a: C64, b: C64) -> (C64, C64) {
    if b.norm() == 0.0 {
        return (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    }
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / r, b / r)
}
