//! Principal Dirichlet eigenpair and linearized stability eigenvalues.
//!
//! `principal_eigenpair` computes the smallest eigenvalue mu_1 of -Laplacian
//! with zero boundary data together with its positive eigenfunction phi_1,
//! normalized so that the quadrature of phi_1 is exactly 1. On the interval
//! (-1, 1) that pair is (pi^2/4, (pi/4) cos(pi x / 2)); on the unit disk it
//! is the square of the first Bessel zero with the matching J_0 profile.
//!
//! `linearized_eigenvalue` measures stability of a steady membrane profile w:
//! the smallest eigenvalue of -Laplacian - 2 lambda / (1 - w)^3. It is
//! positive along the minimal branch and crosses zero at the fold, which is
//! how the continuation code recognizes the pull-in voltage.
//!
//! Both use inverse power iteration with tridiagonal solves. The linearized
//! operator may have negative spectrum, so its iteration shifts by a
//! Gershgorin lower bound first; the shifted matrix is positive definite and
//! the iteration converges to the eigenvalue nearest the shift, which is the
//! smallest one.

use crate::error::{Error, Result};
use crate::geometry::{DiscreteField, Domain};
use crate::tridiag::Tridiagonal;

/// Iteration cap for the eigenvalue solvers.
const MAX_ITER: usize = 10_000;

/// Relative stopping tolerance on successive eigenvalue estimates.
const VALUE_TOL: f64 = 1e-12;

/// Principal eigenvalue with its normalized, positive eigenfunction.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub mu1: f64,
    /// Positive in the interior, zero on the boundary, integral exactly 1.
    pub phi1: DiscreteField,
}

struct InverseIteration {
    /// Eigenvalue of the unshifted operator (Rayleigh quotient).
    value: f64,
    /// Interior-ordered eigenvector, max-norm 1.
    vector: Vec<f64>,
}

/// Runs inverse power iteration on `op - shift * I`, returning the eigenvalue
/// of `op` nearest `shift` (weighted Rayleigh quotient) and its eigenvector.
///
/// `scale` sets the absolute floor of the eigenvalue stopping test so that
/// eigenvalues near zero (the fold) still converge. `resid_tol`, when
/// positive, additionally requires the max-norm eigen-residual to drop below
/// `resid_tol * |value| * ||v||_inf`.
fn inverse_iteration(
    d: &Domain,
    op: &Tridiagonal,
    shift: f64,
    scale: f64,
    resid_tol: f64,
) -> Result<InverseIteration> {
    let shifted = op.shifted(-shift);
    let factor = shifted.factor()?;
    let m = op.order();
    let weights: Vec<f64> = d.interior_indices().map(|j| d.quad_weights[j]).collect();
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (x, y))| w * x * y)
            .sum()
    };

    let mut v = vec![1.0; m];
    let mut value = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let mut y = factor.solve(&v);
        let norm = y.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NoConvergence(MAX_ITER));
        }
        for x in &mut y {
            *x /= norm;
        }
        let ay = op.matvec(&y);
        let new_value = dot(&y, &ay) / dot(&y, &y);
        let value_ok = (new_value - value).abs() <= VALUE_TOL * new_value.abs().max(scale);
        v = y;
        value = new_value;
        if value_ok {
            if resid_tol > 0.0 {
                let vmax = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
                let resid = ay
                    .iter()
                    .zip(&v)
                    .fold(0.0_f64, |a, (ay_i, v_i)| a.max((ay_i - value * v_i).abs()));
                if resid > resid_tol * value.abs() * vmax {
                    continue;
                }
            }
            return Ok(InverseIteration { value, vector: v });
        }
    }
    Err(Error::NoConvergence(MAX_ITER))
}

/// Smallest Dirichlet eigenvalue and eigenfunction of -Laplacian.
pub fn principal_eigenpair(d: &Domain) -> Result<EigenPair> {
    let op = d.neg_laplacian();
    // Shift zero: -Laplacian is positive definite, so the eigenvalue nearest
    // zero is the principal one. The extra residual tolerance keeps the
    // eigenvector itself converged, not just the Rayleigh quotient.
    let it = inverse_iteration(d, &op, 0.0, 0.0, 1e-7)?;
    let mut phi = d.unpack_interior(&it.vector);
    // The iteration starts positive and the inverse is positivity-preserving,
    // but normalize the sign anyway before fixing the integral to 1.
    let mass = d.integrate(&phi)?;
    if mass == 0.0 || !mass.is_finite() {
        return Err(Error::NoConvergence(MAX_ITER));
    }
    for v in &mut phi.values {
        *v /= mass;
    }
    Ok(EigenPair {
        mu1: it.value,
        phi1: phi,
    })
}

/// Smallest eigenvalue of -Laplacian - 2 lambda / (1 - w)^3 on the domain.
///
/// Positive on the stable (minimal) steady branch, decreasing in lambda, and
/// tending to zero at the pull-in voltage.
pub fn linearized_eigenvalue(d: &Domain, lambda: f64, w: &DiscreteField) -> Result<f64> {
    d.check_bound(w)?;
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParams(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    for (j, &v) in w.values.iter().enumerate() {
        if !(0.0..1.0).contains(&v) {
            return Err(Error::FieldOutOfRange(format!(
                "w must satisfy 0 <= w < 1, node {j} holds {v}"
            )));
        }
    }

    let mut op = d.neg_laplacian();
    for (i, j) in d.interior_indices().enumerate() {
        let one_minus = 1.0 - w.values[j];
        op.diag[i] -= 2.0 * lambda / (one_minus * one_minus * one_minus);
    }

    // Gershgorin lower bound, then a margin so the shifted matrix is
    // comfortably positive definite.
    let m = op.order();
    let mut lower = f64::INFINITY;
    for i in 0..m {
        let mut row = op.diag[i];
        if i > 0 {
            row -= op.sub[i - 1].abs();
        }
        if i + 1 < m {
            row -= op.sup[i].abs();
        }
        lower = lower.min(row);
    }
    let scale = lower.abs().max(1.0);
    let shift = lower - 1e-3 * scale;

    let it = inverse_iteration(d, &op, shift, scale, 0.0)?;
    Ok(it.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    const MU1_INTERVAL: f64 = std::f64::consts::PI * std::f64::consts::PI / 4.0;
    /// Square of the first zero of J_0, the principal eigenvalue on the unit disk.
    const MU1_DISK: f64 = 5.783185962946785;

    #[test]
    fn interval_eigenpair_matches_cosine() {
        let d = Domain::new(DomainSpec::interval(1.0, 512)).unwrap();
        let pair = principal_eigenpair(&d).unwrap();
        assert!(
            (pair.mu1 - MU1_INTERVAL).abs() < 1e-4,
            "mu1 = {}",
            pair.mu1
        );
        // Normalized eigenfunction is (pi/4) cos(pi x / 2); its center value
        // is pi/4.
        let center = pair.phi1.values[d.nodes.len() / 2];
        assert!(
            (center - std::f64::consts::PI / 4.0).abs() < 1e-3,
            "phi1(0) = {center}"
        );
        let mass = d.integrate(&pair.phi1).unwrap();
        assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn disk_eigenvalue_matches_bessel_zero() {
        let d = Domain::new(DomainSpec::ball(1.0, 2, 512)).unwrap();
        let pair = principal_eigenpair(&d).unwrap();
        assert!(
            (pair.mu1 - MU1_DISK).abs() / MU1_DISK < 1e-3,
            "mu1 = {}",
            pair.mu1
        );
    }

    #[test]
    fn eigenfunction_is_positive_inside() {
        let d = Domain::new(DomainSpec::ball(1.0, 3, 128)).unwrap();
        let pair = principal_eigenpair(&d).unwrap();
        for j in d.interior_indices() {
            assert!(pair.phi1.values[j] > 0.0, "node {j}");
        }
        assert_eq!(*pair.phi1.values.last().unwrap(), 0.0);
    }

    #[test]
    fn eigen_residual_is_small() {
        for spec in [DomainSpec::interval(1.0, 256), DomainSpec::ball(1.0, 2, 256)] {
            let d = Domain::new(spec).unwrap();
            let pair = principal_eigenpair(&d).unwrap();
            let lap = d.apply_laplacian(&pair.phi1).unwrap();
            let mut resid = 0.0_f64;
            for j in d.interior_indices() {
                // -Laplacian phi = mu phi.
                resid = resid.max((-lap.values[j] - pair.mu1 * pair.phi1.values[j]).abs());
            }
            assert!(
                resid <= 1e-6 * pair.mu1 * pair.phi1.max_abs(),
                "residual {resid}"
            );
        }
    }

    #[test]
    fn rayleigh_quotient_consistency() {
        let d = Domain::new(DomainSpec::interval(1.0, 200)).unwrap();
        let pair = principal_eigenpair(&d).unwrap();
        let lap = d.apply_laplacian(&pair.phi1).unwrap();
        let num = d.integrate_map2(&pair.phi1, &lap, |p, l| -p * l).unwrap();
        let den = d.integrate_map2(&pair.phi1, &pair.phi1, |p, q| p * q).unwrap();
        let rq = num / den;
        assert!(
            (rq - pair.mu1).abs() <= 1e-8 * pair.mu1,
            "rq {rq} vs mu1 {}",
            pair.mu1
        );
    }

    #[test]
    fn linearized_at_zero_profile_is_mu1() {
        let d = Domain::new(DomainSpec::interval(1.0, 256)).unwrap();
        let nu = linearized_eigenvalue(&d, 0.0, &d.zero_field()).unwrap();
        let pair = principal_eigenpair(&d).unwrap();
        assert!((nu - pair.mu1).abs() < 1e-9 * pair.mu1.max(1.0), "nu = {nu}");
    }

    #[test]
    fn linearized_decreases_with_lambda() {
        let d = Domain::new(DomainSpec::interval(1.0, 128)).unwrap();
        let w = d.field_from_fn(|x| 0.1 * (1.0 - x * x));
        let a = linearized_eigenvalue(&d, 0.05, &w).unwrap();
        let b = linearized_eigenvalue(&d, 0.2, &w).unwrap();
        assert!(b < a, "{b} !< {a}");
    }

    #[test]
    fn linearized_rejects_touching_profile() {
        let d = Domain::new(DomainSpec::interval(1.0, 64)).unwrap();
        let w = d.field_from_fn(|x| if x.abs() < 0.1 { 1.0 } else { 0.0 });
        assert!(matches!(
            linearized_eigenvalue(&d, 0.1, &w),
            Err(Error::FieldOutOfRange(_))
        ));
    }
}
