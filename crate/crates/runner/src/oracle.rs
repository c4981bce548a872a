//! Shooting-method reference for the pull-in voltage.
//!
//! The grid solvers find the fold by marching a discretized branch, so
//! their value inherits the grid truncation. This oracle takes a route
//! with none of that machinery in common: integrate the radial profile
//! outward from a prescribed center deflection and read the fold off a
//! scalar function of one variable.
//!
//! With unit forcing, a profile started at height m with zero slope,
//!
//!   u'' + ((n - 1)/r) u' = -1/(1 - u)^2,   u(0) = m,  u'(0) = 0,
//!
//! falls to zero at some first radius rho(m). Rescaling that profile onto
//! a ball of radius b turns the unit forcing into lambda(m) = (rho(m)/b)^2
//! with sup equal to m, so the pull-in voltage is the maximum of lambda
//! over all center heights. One RK4 integration per height and a line
//! search over m replace the whole continuation apparatus.

use crate::error::{Error, Result};

/// Fold data produced by the shooting construction.
#[derive(Debug, Clone, Copy)]
pub struct ShootingFold {
    /// Largest forcing level with a steady profile.
    pub lambda_star: f64,
    /// Center deflection of the profile at the fold.
    pub sup_star: f64,
}

const R_CAP: f64 = 50.0;
const SEED_R: f64 = 1e-3;

/// Radius where the unit-forcing profile from center height m first
/// vanishes, for the radial Laplacian in dimension n.
fn first_zero(n: usize, m: f64) -> Result<f64> {
    let dim = n as f64;
    let f0 = 1.0 / ((1.0 - m) * (1.0 - m));

    // Near touchdown the profile steepens on the scale (1 - m)^{3/2}
    // (set u = 1 - (1 - m) w, r = (1 - m)^{3/2} s and the system becomes
    // height-free), so the step follows that scale to keep the local
    // error uniform over the scan.
    let step = 1e-3 * (1.0 - m).powf(1.5);

    // Quartic series seed clears the (n - 1)/r singularity at the center:
    // u = m - f0 r^2 / (2n) + c4 r^4 with c4 fixed by matching the r^2
    // terms of both sides.
    let c4 = f0 * f0 / (4.0 * dim * (dim + 2.0) * (1.0 - m));
    let mut r = SEED_R * (1.0 - m).powf(1.5);
    let mut u = m - f0 * r * r / (2.0 * dim) + c4 * r.powi(4);
    let mut p = -f0 * r / dim + 4.0 * c4 * r.powi(3);

    let slope = |r: f64, u: f64, p: f64| -> (f64, f64) {
        let g = 1.0 - u;
        (p, -1.0 / (g * g) - (dim - 1.0) * p / r)
    };

    while r < R_CAP {
        let (k1u, k1p) = slope(r, u, p);
        let (k2u, k2p) = slope(r + 0.5 * step, u + 0.5 * step * k1u, p + 0.5 * step * k1p);
        let (k3u, k3p) = slope(r + 0.5 * step, u + 0.5 * step * k2u, p + 0.5 * step * k2p);
        let (k4u, k4p) = slope(r + step, u + step * k3u, p + step * k3p);
        let u_next = u + step / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        let p_next = p + step / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);

        if u_next <= 0.0 {
            // Cubic Hermite on the bracketing step pins the crossing to
            // the same order as the integrator.
            let s = hermite_zero(step, u, p, u_next, p_next);
            return Ok(r + s);
        }
        u = u_next;
        p = p_next;
        r += step;
    }
    Err(Error::Oracle(format!(
        "profile from height {m} never reached zero within r = {R_CAP}"
    )))
}

/// Zero of the cubic Hermite interpolant on [0, h] with endpoint values
/// u0 > 0 >= u1 and slopes p0, p1.
fn hermite_zero(h: f64, u0: f64, p0: f64, u1: f64, p1: f64) -> f64 {
    let eval = |s: f64| -> (f64, f64) {
        let t = s / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let v = h00 * u0 + h10 * h * p0 + h01 * u1 + h11 * h * p1;
        let d00 = 6.0 * t * (t - 1.0) / h;
        let d10 = (1.0 - t) * (1.0 - 3.0 * t);
        let d01 = -6.0 * t * (t - 1.0) / h;
        let d11 = t * (3.0 * t - 2.0);
        let dv = d00 * u0 + d10 * p0 + d01 * u1 + d11 * p1;
        (v, dv)
    };
    let mut s = h * u0 / (u0 - u1).max(f64::MIN_POSITIVE);
    for _ in 0..6 {
        let (v, dv) = eval(s);
        if dv != 0.0 {
            s = (s - v / dv).clamp(0.0, h);
        }
    }
    s
}

/// Forcing level whose minimal profile on a radius-b ball (or half-width-b
/// interval for n = 1) has center height m.
fn lambda_of_height(n: usize, b: f64, m: f64) -> Result<f64> {
    let rho = first_zero(n, m)?;
    Ok((rho / b) * (rho / b))
}

/// Pull-in voltage by shooting, for the interval (n = 1, half-width b) or
/// the ball of radius b in dimension n.
///
/// A coarse scan over center heights locates the global hump; golden
/// section inside the bracketing cell then resolves the maximum. The scan
/// step is wide enough to be cheap and narrow enough that the later folds
/// of the (3 <= n <= 7) oscillating branch, all strictly lower, cannot
/// steal the bracket.
pub fn pull_in_shooting(n: usize, b: f64) -> Result<ShootingFold> {
    if n == 0 || n > 7 {
        return Err(Error::Oracle(format!("dimension {n} out of range")));
    }
    if !b.is_finite() || b <= 0.0 {
        return Err(Error::Oracle(format!("bad radius {b}")));
    }

    let heights: Vec<f64> = (1..=49).map(|i| 0.02 * i as f64).collect();
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &m) in heights.iter().enumerate() {
        let lam = lambda_of_height(n, b, m)?;
        if lam > best.1 {
            best = (i, lam);
        }
    }
    let mut lo = heights[best.0.saturating_sub(1)];
    let mut hi = heights[(best.0 + 1).min(heights.len() - 1)];

    // Golden-section ascent on the bracket.
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = lambda_of_height(n, b, x1)?;
    let mut f2 = lambda_of_height(n, b, x2)?;
    for _ in 0..40 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = lambda_of_height(n, b, x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = lambda_of_height(n, b, x1)?;
        }
    }
    let sup_star = 0.5 * (lo + hi);
    Ok(ShootingFold {
        lambda_star: lambda_of_height(n, b, sup_star)?,
        sup_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // The slab and disk anchors 0.350 and 0.789 are the classical pull-in
    // values. The three-dimensional number is frozen from this oracle after
    // it agreed with the grid solver's extrapolated fold within the
    // latter's bracket width; every value must also respect the rigorous
    // ceiling 4 mu1 / 27.
    #[test]
    fn reference_folds_match_the_classical_values() {
        let slab = pull_in_shooting(1, 1.0).unwrap();
        assert!((slab.lambda_star - 0.350).abs() < 5e-4, "{}", slab.lambda_star);
        let disk = pull_in_shooting(2, 1.0).unwrap();
        assert!((disk.lambda_star - 0.789).abs() < 1e-3, "{}", disk.lambda_star);
        let ball = pull_in_shooting(3, 1.0).unwrap();
        assert!((ball.lambda_star - 1.2988).abs() < 5e-4, "{}", ball.lambda_star);

        let mu1 = [
            std::f64::consts::PI * std::f64::consts::PI / 4.0,
            5.783_185_962_946_785,
            std::f64::consts::PI * std::f64::consts::PI,
        ];
        for (fold, mu1) in [slab, disk, ball].iter().zip(mu1) {
            assert!(fold.lambda_star <= 4.0 * mu1 / 27.0);
        }
    }

    #[test]
    fn fold_deflection_sits_well_inside_the_gap() {
        // The fold profile keeps a finite gap to touchdown in every low
        // dimension; the slab folds near height 0.39.
        let slab = pull_in_shooting(1, 1.0).unwrap();
        assert!((slab.sup_star - 0.388).abs() < 5e-3, "{}", slab.sup_star);
    }

    #[test]
    fn doubling_the_radius_quarters_the_fold() {
        // lambda scales exactly like 1/b^2 here because rho(m) does not
        // depend on b; this pins the rescaling code path.
        let one = pull_in_shooting(2, 1.0).unwrap();
        let two = pull_in_shooting(2, 2.0).unwrap();
        assert!((two.lambda_star - one.lambda_star / 4.0).abs() < 1e-12);
    }

    #[test]
    fn first_zero_respects_the_analytic_sandwich() {
        // The forcing along the fall stays between its endpoint values
        // 1 and 1/(1-m)^2, so integrating the radial flux twice brackets
        // the crossing radius between sqrt(2nm) (1-m) and sqrt(2nm).
        let (n, m) = (2, 0.4);
        let rho = first_zero(n, m).unwrap();
        let outer = (2.0 * n as f64 * m).sqrt();
        let inner = outer * (1.0 - m);
        assert!(rho > inner && rho < outer, "rho = {rho} not in ({inner}, {outer})");
    }
}
