//! Refinement studies: every discretization in the crate claims second order
//! in space (first order in time for the stepper), and these tests measure
//! the actual decay rates instead of trusting the stencils.
//!
//! Interval grids with M and 2M+1 interior nodes are nested (the coarse
//! nodes are every second fine node), so coarse and reference profiles can
//! be compared nodewise without interpolation. Ball grids nest at M and 2M.

use mems_core::geometry::{DiscreteField, Domain, DomainSpec};
use mems_core::{energy_ledger, evolve, principal_eigenpair, solve_nonlocal_steady, EvolveOptions};

fn interval(m: usize) -> Domain {
    Domain::new(DomainSpec::interval(1.0, m)).unwrap()
}

/// Max difference between a coarse field and a reference field on a grid
/// refined from it `levels` times (each level doubles the node count).
fn nested_gap(coarse: &DiscreteField, fine: &DiscreteField, levels: u32) -> f64 {
    let stride = 2usize.pow(levels);
    assert_eq!(
        (fine.values.len() - 1),
        (coarse.values.len() - 1) * stride,
        "grids are not nested"
    );
    coarse
        .values
        .iter()
        .zip(fine.values.iter().step_by(stride))
        .map(|(c, f)| (c - f).abs())
        .fold(0.0, f64::max)
}

#[test]
fn poisson_error_quarters_under_grid_doubling() {
    // -g'' = cos(3x) on (-1,1) has the closed form below; the stencil error
    // is smooth, so consecutive error ratios sit near 4.
    let exact = |x: f64| ((3.0 * x).cos() - (3.0_f64).cos()) / 9.0;
    let mut errors = Vec::new();
    for m in [31, 63, 127] {
        let d = interval(m);
        let rhs = d.field_from_fn(|x| (3.0 * x).cos());
        let g = d.solve_poisson(&rhs).unwrap();
        let err = g
            .values
            .iter()
            .zip(d.nodes.iter())
            .map(|(v, x)| (v - exact(*x)).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(
            (3.5..=4.5).contains(&ratio),
            "poisson error ratio {ratio} outside the second-order band, errors {errors:?}"
        );
    }
}

#[test]
fn eigenvalue_error_quarters_under_grid_doubling() {
    let exact = std::f64::consts::PI * std::f64::consts::PI / 4.0;
    let mut errors = Vec::new();
    for m in [31, 63, 127] {
        let d = interval(m);
        let pair = principal_eigenpair(&d).unwrap();
        errors.push((pair.mu1 - exact).abs());
    }
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(
            (3.5..=4.5).contains(&ratio),
            "eigenvalue error ratio {ratio} outside the second-order band, errors {errors:?}"
        );
    }
}

#[test]
fn nonlocal_deflection_error_quarters_under_grid_doubling() {
    // The solver meets its own algebraic tolerance at every resolution, so
    // what remains is pure discretization error: measure it on nested grids
    // against a reference four doublings finer.
    let chi = 1.0;
    let lambda = 0.5;
    let reference = solve_nonlocal_steady(&interval(511), chi, lambda).unwrap();
    let mut errors = Vec::new();
    for (levels, m) in [(4, 31), (3, 63), (2, 127)] {
        let sol = solve_nonlocal_steady(&interval(m), chi, lambda).unwrap();
        errors.push(nested_gap(&sol.v, &reference.v, levels));
    }
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(
            (3.5..=4.5).contains(&ratio),
            "deflection error ratio {ratio} outside the second-order band, errors {errors:?}"
        );
    }
}

#[test]
fn lyapunov_drift_shrinks_with_the_step() {
    // The energy balance is exact for the continuum flow. Numerically it
    // drifts for two reasons: the first-order stepper biases the
    // trajectory by O(dt), and the ledger's trapezoid over snapshots
    // spaced Delta apart misses O(Delta^2). Keeping the stride fixed ties
    // Delta to dt, so the combination must shrink linearly.
    let d = interval(64);
    let chi = 1.0;
    let lambda = 0.5;
    let mut drifts = Vec::new();
    for dt in [8e-4_f64, 4e-4, 2e-4] {
        let mut opts = EvolveOptions::new(dt, 1.0).with_stride(5);
        opts.steady_tol = 1e-14;
        let res = evolve(&d, chi, lambda, &d.zero_field(), &opts).unwrap();
        let ledger = energy_ledger(&d, &res, 0.1).unwrap();
        drifts.push(ledger.max_lyapunov_drift());
    }
    for pair in drifts.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(
            (1.4..=2.6).contains(&ratio),
            "drift ratio {ratio} outside the first-order band, drifts {drifts:?}"
        );
    }
}

#[test]
fn extremal_capacitance_is_stable_under_refinement() {
    // The capacitance of the last resolved branch profile is a convergent
    // quantity; successive grid doublings must agree within a few percent.
    let mut caps = Vec::new();
    for m in [63, 127] {
        let d = interval(m);
        let branch = mems_core::pull_in_voltage(&d).unwrap();
        let w = &branch.w_star().unwrap().w;
        caps.push(mems_core::capacitance(&d, w).unwrap());
    }
    let rel = (caps[0] - caps[1]).abs() / caps[1];
    assert!(
        rel <= 0.05,
        "extremal capacitance moved by {rel:.4} between grids, values {caps:?}"
    );
}
