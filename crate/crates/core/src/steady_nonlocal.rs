//! Steady states of the nonlocal membrane equation via the scalar reduction.
//!
//! The nonlocal steady problem
//!
//! ```text
//! -Laplacian v = lambda / [ (1 - v)^2 (1 + chi int_Omega dx/(1 - v))^2 ]
//! ```
//!
//! reduces to the local one: v solves it exactly when v = w_mu is a local
//! minimal solution and the scalar
//!
//! ```text
//! h(mu) = mu (1 + chi int_Omega dx/(1 - w_mu))^2
//! ```
//!
//! equals lambda. The map h is strictly increasing on the minimal branch
//! (both mu and the capacitance integral grow with mu), so a bisection on mu
//! in [0, mu_max] finds the unique minimal-branch root; lambda beyond
//! h(mu_max) has no such root and is reported as [`Error::RootOutOfRange`].
//! Here mu_max is the last resolved branch point, within relative 1e-4 of
//! the fold.
//!
//! The threshold report collects the quantities that sandwich the nonlocal
//! pull-in range: the local fold lambda*, its nonlocal image
//! lambda* (1 + chi C*)^2 with C* the capacitance of the extremal profile,
//! the explicit convex-domain nonexistence bound (balls of dimension >= 2),
//! and the one-dimensional global-existence threshold.

use crate::error::{Error, Result};
use crate::geometry::{DiscreteField, Domain, DomainKind};
use crate::steady_local::{monotone_solve, pull_in_voltage, SteadyBranch};

/// Minimal-branch solution of the nonlocal steady problem.
#[derive(Debug, Clone)]
pub struct NonlocalSolution {
    pub lambda: f64,
    pub chi: f64,
    /// Root of h(mu) = lambda; the local forcing level of the profile.
    pub mu_root: f64,
    /// The deflection profile, a local minimal solution w_{mu_root}.
    pub v: DiscreteField,
    /// int_Omega dx / (1 - v).
    pub capacitance_integral: f64,
}

/// Threshold quantities for one (domain, chi) pair.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    /// Local pull-in voltage lambda*.
    pub lambda_star_local: f64,
    /// lambda* (1 + chi int dx/(1 - w*))^2: steady states exist below this.
    pub lambda_star_nonlocal: f64,
    /// Explicit nonexistence bound on strictly convex domains; only balls of
    /// dimension >= 2 qualify here.
    pub upper_bound_convex: Option<f64>,
    /// chi (1 + chi |Omega|) / (2 |Omega|), the one-dimensional threshold
    /// below which evolutions exist globally.
    pub interval_threshold: Option<f64>,
}

/// int_Omega dx / (1 - u), the capacitance-style integral of a profile.
pub fn capacitance(d: &Domain, u: &DiscreteField) -> Result<f64> {
    d.check_bound(u)?;
    if u.values.iter().any(|&v| v >= 1.0) {
        return Err(Error::FieldOutOfRange(
            "capacitance integral needs u < 1 everywhere".into(),
        ));
    }
    d.integrate_map(u, |v| 1.0 / (1.0 - v))
}

/// The scalar reduction h(mu) = mu (1 + chi int dx/(1 - w_mu))^2.
///
/// Propagates [`Error::NoSteadyState`] when mu is beyond the local fold.
pub fn h_map(d: &Domain, chi: f64, mu: f64) -> Result<f64> {
    check_chi(chi)?;
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::InvalidParams(format!(
            "mu must be nonnegative, got {mu}"
        )));
    }
    if mu == 0.0 {
        return Ok(0.0);
    }
    let w = crate::steady_local::minimal_solution(d, mu)?;
    let cap = capacitance(d, &w)?;
    Ok(h_value(mu, chi, cap))
}

fn h_value(mu: f64, chi: f64, cap: f64) -> f64 {
    let bracket = 1.0 + chi * cap;
    mu * bracket * bracket
}

fn check_chi(chi: f64) -> Result<()> {
    if !chi.is_finite() || chi < 0.0 {
        return Err(Error::InvalidParams(format!(
            "chi must be nonnegative, got {chi}"
        )));
    }
    Ok(())
}

/// Solves the nonlocal steady problem on the minimal branch.
///
/// Computes the local branch first; use
/// [`solve_nonlocal_steady_with_branch`] to amortize that over many calls.
pub fn solve_nonlocal_steady(d: &Domain, chi: f64, lambda: f64) -> Result<NonlocalSolution> {
    check_chi(chi)?;
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return trivial_solution(d, chi);
    }
    let branch = pull_in_voltage(d)?;
    solve_nonlocal_steady_with_branch(d, chi, lambda, &branch)
}

/// Same as [`solve_nonlocal_steady`] but reusing an already computed branch.
pub fn solve_nonlocal_steady_with_branch(
    d: &Domain,
    chi: f64,
    lambda: f64,
    branch: &SteadyBranch,
) -> Result<NonlocalSolution> {
    check_chi(chi)?;
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return trivial_solution(d, chi);
    }

    let last = branch.w_star()?;
    let mu_max = last.lambda;
    let cap_max = capacitance(d, &last.w)?;
    let h_max = h_value(mu_max, chi, cap_max);
    if lambda > h_max {
        return Err(Error::RootOutOfRange { lambda, h_max });
    }
    // Two orders tighter than the 1e-8 residual callers rely on, because a
    // fresh evaluation of h at the returned root (cold-started, unlike the
    // warm-started solves inside the loop) lands on a slightly different
    // capacitance.
    let tol = 1e-10 * lambda.max(1.0);

    // Check the upper endpoint first; the bisection below assumes the root
    // is strictly inside.
    if (h_max - lambda).abs() <= tol {
        return Ok(NonlocalSolution {
            lambda,
            chi,
            mu_root: mu_max,
            v: last.w.clone(),
            capacitance_integral: cap_max,
        });
    }

    // Decoupled case: h is the identity, so the root is lambda itself and
    // bisection would only blur it to the stopping tolerance.
    if chi == 0.0 {
        let solve = monotone_solve(d, lambda, &d.zero_field())?;
        let cap = capacitance(d, &solve.w)?;
        return Ok(NonlocalSolution {
            lambda,
            chi,
            mu_root: lambda,
            v: solve.w,
            capacitance_integral: cap,
        });
    }

    // Bisect on mu, warm-starting each solve from the last lower solution.
    // The h evaluation carries the inner solver's noise, so instead of
    // demanding the residual target outright the loop also stops once the
    // mu bracket collapses to machine width and returns the best midpoint
    // seen; the residual is then limited only by that noise floor.
    let mut lo = 0.0_f64;
    let mut w_lo = d.zero_field();
    let mut hi = mu_max;
    let mut best: Option<NonlocalSolution> = None;
    let mut best_miss = f64::INFINITY;
    for _ in 0..240 {
        let mid = 0.5 * (lo + hi);
        let solve = monotone_solve(d, mid, &w_lo)?;
        let cap = capacitance(d, &solve.w)?;
        let h_mid = h_value(mid, chi, cap);
        let miss = (h_mid - lambda).abs();
        if miss < best_miss {
            best_miss = miss;
            best = Some(NonlocalSolution {
                lambda,
                chi,
                mu_root: mid,
                v: solve.w.clone(),
                capacitance_integral: cap,
            });
        }
        if miss <= tol || hi - lo <= f64::EPSILON * mu_max {
            break;
        }
        if h_mid < lambda {
            lo = mid;
            w_lo = solve.w;
        } else {
            hi = mid;
        }
    }
    best.ok_or(Error::NoConvergence(240))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParams(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    Ok(())
}

fn trivial_solution(d: &Domain, chi: f64) -> Result<NonlocalSolution> {
    let v = d.zero_field();
    let cap = capacitance(d, &v)?;
    Ok(NonlocalSolution {
        lambda: 0.0,
        chi,
        mu_root: 0.0,
        v,
        capacitance_integral: cap,
    })
}

/// Explicit nonexistence bound for strictly convex domains,
/// (n+2)^2 |boundary| / (8 a n) * (chi (2 + chi |Omega|) + 1/|Omega|),
/// with a the minimal boundary support distance (the radius for balls).
///
/// Only balls of dimension >= 2 qualify among the supported shapes.
pub fn convex_upper_bound(d: &Domain, chi: f64) -> Result<f64> {
    check_chi(chi)?;
    if d.spec.kind != DomainKind::Ball || d.spec.dim < 2 {
        return Err(Error::UnsupportedDomain(
            "the convex-domain bound needs a ball of dimension >= 2".into(),
        ));
    }
    let n = d.spec.dim as f64;
    let a = d.convexity_constant;
    let vol = d.volume;
    let geometry = (n + 2.0) * (n + 2.0) * d.boundary_measure / (8.0 * a * n);
    Ok(geometry * (chi * (2.0 + chi * vol) + 1.0 / vol))
}

/// One-dimensional global-existence threshold chi (1 + chi |Omega|) / (2 |Omega|).
pub fn interval_threshold(d: &Domain, chi: f64) -> Result<f64> {
    check_chi(chi)?;
    let one_dimensional = d.spec.kind == DomainKind::Interval || d.spec.dim == 1;
    if !one_dimensional {
        return Err(Error::UnsupportedDomain(
            "the global-existence threshold is one-dimensional".into(),
        ));
    }
    Ok(chi * (1.0 + chi * d.volume) / (2.0 * d.volume))
}

/// Collects the threshold quantities for a (domain, chi) pair.
pub fn thresholds(d: &Domain, chi: f64) -> Result<ThresholdReport> {
    check_chi(chi)?;
    let branch = pull_in_voltage(d)?;
    thresholds_with_branch(d, chi, &branch)
}

/// Same as [`thresholds`] but reusing an already computed branch.
pub fn thresholds_with_branch(
    d: &Domain,
    chi: f64,
    branch: &SteadyBranch,
) -> Result<ThresholdReport> {
    check_chi(chi)?;
    let last = branch.w_star()?;
    let cap_star = capacitance(d, &last.w)?;
    Ok(ThresholdReport {
        lambda_star_local: branch.lambda_star,
        lambda_star_nonlocal: h_value(branch.lambda_star, chi, cap_star),
        upper_bound_convex: convex_upper_bound(d, chi).ok(),
        interval_threshold: interval_threshold(d, chi).ok(),
    })
}

/// Smallest lambda on a geometric grid at which the nonlocal solve reports
/// no minimal-branch root.
///
/// The grid starts at the provable existence level
/// lambda* (1 + chi |Omega|)^2 and grows by 2% per step, so the returned
/// value overshoots the true onset by at most one grid ratio.
pub fn nonexistence_onset(d: &Domain, chi: f64) -> Result<f64> {
    check_chi(chi)?;
    let branch = pull_in_voltage(d)?;
    let bracket = 1.0 + chi * d.volume;
    let mut lambda = branch.lambda_star * bracket * bracket;
    for _ in 0..10_000 {
        match solve_nonlocal_steady_with_branch(d, chi, lambda, &branch) {
            Ok(_) => lambda *= 1.02,
            Err(Error::RootOutOfRange { .. }) => return Ok(lambda),
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoConvergence(10_000))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::steady_local::minimal_solution;

    #[test]
    fn h_vanishes_at_zero_and_reduces_for_chi_zero() {
        let d = Domain::new(DomainSpec::interval(1.0, 96)).unwrap();
        assert_eq!(h_map(&d, 1.0, 0.0).unwrap(), 0.0);
        let mu = 0.2;
        let h = h_map(&d, 0.0, mu).unwrap();
        assert!((h - mu).abs() <= 1e-12 * mu);
    }

    #[test]
    fn h_is_strictly_increasing() {
        let d = Domain::new(DomainSpec::interval(1.0, 96)).unwrap();
        let mut prev = 0.0;
        for mu in [0.02, 0.08, 0.16, 0.24, 0.3] {
            let h = h_map(&d, 0.5, mu).unwrap();
            assert!(h > prev, "h({mu}) = {h} did not increase past {prev}");
            prev = h;
        }
    }

    #[test]
    fn root_satisfies_scalar_equation() {
        let d = Domain::new(DomainSpec::interval(1.0, 128)).unwrap();
        for (chi, lambda) in [(0.3, 0.4), (1.0, 0.5), (2.0, 1.7)] {
            let sol = solve_nonlocal_steady(&d, chi, lambda).unwrap();
            let bracket = 1.0 + chi * sol.capacitance_integral;
            let defect = (sol.mu_root * bracket * bracket - lambda).abs();
            assert!(
                defect <= 1e-8 * lambda.max(1.0),
                "defect {defect} at chi={chi}, lambda={lambda}"
            );
            assert!(sol.v.sup() < 1.0);
        }
    }

    #[test]
    fn chi_zero_recovers_local_solution() {
        let d = Domain::new(DomainSpec::interval(1.0, 96)).unwrap();
        let sol = solve_nonlocal_steady(&d, 0.0, 0.25).unwrap();
        let w = minimal_solution(&d, 0.25).unwrap();
        assert!(sol.v.max_diff(&w).unwrap() <= 1e-10);
        assert!((sol.mu_root - 0.25).abs() <= 1e-10);
    }

    #[test]
    fn zero_lambda_gives_flat_profile() {
        let d = Domain::new(DomainSpec::interval(1.0, 64)).unwrap();
        let sol = solve_nonlocal_steady(&d, 0.7, 0.0).unwrap();
        assert_eq!(sol.v.max_abs(), 0.0);
        assert!((sol.capacitance_integral - d.volume).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_lambda_is_reported() {
        let d = Domain::new(DomainSpec::interval(1.0, 96)).unwrap();
        let report = thresholds(&d, 1.0).unwrap();
        let lambda = 1.2 * report.lambda_star_nonlocal;
        match solve_nonlocal_steady(&d, 1.0, lambda) {
            Err(Error::RootOutOfRange { h_max, .. }) => {
                assert!(h_max < lambda);
            }
            other => panic!("expected RootOutOfRange, got {other:?}"),
        }
    }

    #[test]
    fn h_scan_crosses_target_once() {
        let d = Domain::new(DomainSpec::interval(1.0, 96)).unwrap();
        let chi = 1.0;
        let branch = pull_in_voltage(&d).unwrap();
        let sol = solve_nonlocal_steady_with_branch(&d, chi, 0.6, &branch).unwrap();
        let mu_max = branch.w_star().unwrap().lambda;
        let mut crossings = 0;
        let mut prev_sign = -1.0_f64; // h(0) - lambda < 0
        let mut w = d.zero_field();
        for k in 1..=200 {
            let mu = mu_max * k as f64 / 200.0;
            let solve = monotone_solve(&d, mu, &w).unwrap();
            let cap = capacitance(&d, &solve.w).unwrap();
            w = solve.w;
            let sign = (h_value(mu, chi, cap) - sol.lambda).signum();
            if sign != prev_sign && sign != 0.0 {
                crossings += 1;
                prev_sign = sign;
            }
        }
        assert_eq!(crossings, 1);
    }

    #[test]
    fn threshold_formulas_on_reference_shapes() {
        let disk = Domain::new(DomainSpec::ball(1.0, 2, 64)).unwrap();
        let bound = convex_upper_bound(&disk, 0.1).unwrap();
        assert!((bound - 3.4540).abs() < 1e-3, "bound = {bound}");

        let interval = Domain::new(DomainSpec::interval(1.0, 64)).unwrap();
        let thr = interval_threshold(&interval, 1.0).unwrap();
        assert!((thr - 0.75).abs() < 1e-12, "threshold = {thr}");

        assert!(matches!(
            convex_upper_bound(&interval, 0.1),
            Err(Error::UnsupportedDomain(_))
        ));
        assert!(matches!(
            interval_threshold(&disk, 0.1),
            Err(Error::UnsupportedDomain(_))
        ));
    }

    #[test]
    fn nonlocal_fold_dominates_scaled_local_fold() {
        let d = Domain::new(DomainSpec::interval(1.0, 96)).unwrap();
        let chi = 0.5;
        let report = thresholds(&d, chi).unwrap();
        let bracket = 1.0 + chi * d.volume;
        assert!(report.lambda_star_nonlocal >= report.lambda_star_local * bracket * bracket);
    }

    #[test]
    fn weak_coupling_collapses_to_local_fold() {
        let d = Domain::new(DomainSpec::interval(1.0, 96)).unwrap();
        let report = thresholds(&d, 1e-4).unwrap();
        let ratio = report.lambda_star_nonlocal / report.lambda_star_local;
        assert!((ratio - 1.0).abs() < 0.01, "ratio = {ratio}");
    }

    #[test]
    fn onset_sits_at_the_resolvable_edge() {
        let d = Domain::new(DomainSpec::interval(1.0, 96)).unwrap();
        let chi = 1.0;
        let report = thresholds(&d, chi).unwrap();
        let onset = nonexistence_onset(&d, chi).unwrap();
        assert!(onset >= 0.999 * report.lambda_star_nonlocal, "onset = {onset}");
        assert!(onset <= 1.021 * report.lambda_star_nonlocal, "onset = {onset}");
    }
}
