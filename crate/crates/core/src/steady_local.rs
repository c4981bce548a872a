//! Minimal steady states of the local membrane equation and the pull-in fold.
//!
//! The local steady problem is
//!
//! ```text
//! -Laplacian w = lambda / (1 - w)^2,   w = 0 on the boundary,  0 <= w < 1.
//! ```
//!
//! For small lambda it has a minimal solution w_lambda, obtained here by the
//! classical monotone (Picard) iteration
//!
//! ```text
//! w_{k+1} = (-Laplacian)^{-1} [ lambda / (1 - w_k)^2 ],   w_0 = 0,
//! ```
//!
//! whose iterates increase nodewise toward the minimal fixed point. Above
//! the pull-in voltage lambda* no steady state exists and the iterates climb
//! toward touchdown (w -> 1); the solver reports that as
//! [`Error::NoSteadyState`], which is exactly the signal the continuation in
//! [`pull_in_voltage`] uses to bracket the fold.
//!
//! Testing the equation against the principal eigenfunction gives the a
//! priori bound lambda* <= 4 mu_1 / 27 (the constant comes from
//! max_w w (1-w)^2 = 4/27), which holds verbatim for the discrete operator
//! and caps the continuation range.

use crate::error::{Error, Result};
use crate::geometry::{DiscreteField, Domain};
use crate::spectral::{linearized_eigenvalue, principal_eigenpair};

/// Iteration cap for the monotone solver.
const ITERATION_CAP: usize = 100_000;

/// Divergence guard: iterates at or above this sup are counted as touchdown.
const TOUCHDOWN: f64 = 1.0 - 1e-6;

/// One resolved point of the minimal branch.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub lambda: f64,
    pub w: DiscreteField,
    pub sup_w: f64,
    /// Smallest eigenvalue of the linearization at (lambda, w); positive on
    /// the minimal branch and tending to zero at the fold.
    pub lin_eig: f64,
}

/// Minimal branch swept in lambda up to the pull-in fold.
#[derive(Debug, Clone)]
pub struct SteadyBranch {
    /// Resolved points in strictly increasing lambda order.
    pub points: Vec<BranchPoint>,
    /// Fold location, bracketed to relative width 1e-4.
    pub lambda_star: f64,
}

impl SteadyBranch {
    /// Profile at the last resolved branch point, the proxy for the extremal
    /// solution w*.
    pub fn w_star(&self) -> Result<&BranchPoint> {
        self.points.last().ok_or(Error::EmptyBranch)
    }
}

pub(crate) struct MonotoneSolve {
    pub w: DiscreteField,
    pub iterations: usize,
    /// Largest nodewise decrease seen between consecutive iterates; stays at
    /// zero (up to roundoff) when the start is a subsolution.
    pub monotone_defect: f64,
}

/// Monotone iteration from `start`, which must lie below the minimal
/// solution (zero always qualifies, as does any minimal solution for a
/// smaller lambda).
pub(crate) fn monotone_solve(
    d: &Domain,
    lambda: f64,
    start: &DiscreteField,
) -> Result<MonotoneSolve> {
    let tol = 1e-8 * lambda.max(1.0);
    let factor = d.neg_laplacian().factor()?;
    let mut w: Vec<f64> = d.pack_interior(start);
    let mut rhs = vec![0.0; w.len()];
    let mut defect = 0.0_f64;

    let reaction = |w: &[f64], out: &mut [f64]| {
        for (o, &v) in out.iter_mut().zip(w) {
            let om = 1.0 - v;
            *o = lambda / (om * om);
        }
    };

    for iter in 1..=ITERATION_CAP {
        reaction(&w, &mut rhs);
        let next = factor.solve(&rhs);
        let mut sup = 0.0_f64;
        for (&n, &p) in next.iter().zip(&w) {
            sup = sup.max(n);
            defect = defect.max(p - n);
        }
        if !sup.is_finite() || sup >= TOUCHDOWN {
            return Err(Error::NoSteadyState {
                lambda,
                reason: format!("iterates reached sup = {sup:.6} after {iter} iterations"),
            });
        }
        // The new iterate satisfies -Laplacian w_{k+1} = f(w_k) exactly, so
        // its residual is f(w_k) - f(w_{k+1}).
        let mut residual = 0.0_f64;
        let mut next_rhs = vec![0.0; w.len()];
        reaction(&next, &mut next_rhs);
        for (&a, &b) in rhs.iter().zip(&next_rhs) {
            residual = residual.max((a - b).abs());
        }
        w = next;
        if residual <= tol {
            return Ok(MonotoneSolve {
                w: d.unpack_interior(&w),
                iterations: iter,
                monotone_defect: defect,
            });
        }
    }
    Err(Error::NoSteadyState {
        lambda,
        reason: format!("no convergence within {ITERATION_CAP} iterations"),
    })
}

/// Minimal steady state at the given lambda, by monotone iteration from zero.
///
/// The result satisfies the discrete equation with max-norm residual at most
/// `1e-8 * max(1, lambda)`. Above the fold the iterates run toward touchdown
/// and [`Error::NoSteadyState`] is returned.
pub fn minimal_solution(d: &Domain, lambda: f64) -> Result<DiscreteField> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParams(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    if lambda == 0.0 {
        return Ok(d.zero_field());
    }
    Ok(monotone_solve(d, lambda, &d.zero_field())?.w)
}

/// Sweeps the minimal branch adaptively and brackets the pull-in voltage.
///
/// Continuation steps warm-start from the previous profile (a subsolution of
/// the next problem, so minimality is preserved); the step halves when the
/// iteration slows or the stability margin collapses, and a final bisection
/// between the last success and first failure pins lambda* to relative width
/// 1e-4.
pub fn pull_in_voltage(d: &Domain) -> Result<SteadyBranch> {
    let pair = principal_eigenpair(d)?;
    let lambda_cap = 4.0 * pair.mu1 / 27.0;

    let mut points = vec![BranchPoint {
        lambda: 0.0,
        w: d.zero_field(),
        sup_w: 0.0,
        lin_eig: pair.mu1,
    }];

    let mut push_point = |lambda: f64, w: DiscreteField| -> Result<f64> {
        let lin_eig = linearized_eigenvalue(d, lambda, &w)?;
        points.push(BranchPoint {
            lambda,
            sup_w: w.sup(),
            lin_eig,
            w,
        });
        Ok(lin_eig)
    };

    let mut lo = 0.0_f64;
    let mut w_lo = d.zero_field();
    let mut step = lambda_cap / 32.0;
    let mut hi = None;

    // March up the branch until a step fails; lambda_cap itself is beyond
    // the fold, so failure is guaranteed before the cap is passed.
    for _ in 0..10_000 {
        let lambda_try = (lo + step).min(lambda_cap);
        match monotone_solve(d, lambda_try, &w_lo) {
            Ok(solve) => {
                debug_assert!(
                    solve.monotone_defect <= 1e-12,
                    "warm start stopped being a subsolution, defect {}",
                    solve.monotone_defect
                );
                w_lo = solve.w.clone();
                lo = lambda_try;
                let lin = push_point(lambda_try, solve.w)?;
                if solve.iterations > 20_000 || lin < 0.04 * pair.mu1 {
                    step *= 0.5;
                }
                if lambda_try >= lambda_cap {
                    // Cannot happen for the continuous problem; treat as a
                    // failed bracket rather than looping forever.
                    return Err(Error::NoConvergence(10_000));
                }
            }
            Err(Error::NoSteadyState { .. }) => {
                hi = Some(lo + step.min(lambda_cap - lo));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let mut hi = hi.ok_or(Error::NoConvergence(10_000))?;

    // Bisection; successful midpoints extend the stored branch so the last
    // point ends up within relative 1e-4 of the fold.
    while hi - lo > 1e-4 * lo.max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        match monotone_solve(d, mid, &w_lo) {
            Ok(solve) => {
                w_lo = solve.w.clone();
                lo = mid;
                push_point(mid, solve.w)?;
            }
            Err(Error::NoSteadyState { .. }) => hi = mid,
            Err(e) => return Err(e),
        }
    }

    Ok(SteadyBranch {
        points,
        lambda_star: 0.5 * (lo + hi),
    })
}
