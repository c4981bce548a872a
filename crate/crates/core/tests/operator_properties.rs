//! Structural properties of the quadrature and the discrete Laplacian that
//! every downstream solver leans on, probed over randomized inputs where the
//! property is claimed for a whole family.

use mems_core::geometry::{Domain, DomainSpec};
use proptest::prelude::*;

proptest! {
    // Node values of an affine function coincide with its piecewise-linear
    // interpolant, and the weights integrate that interpolant exactly, so
    // the quadrature must reproduce the closed-form integral for any slope,
    // offset, size, and resolution.
    #[test]
    fn quadrature_is_exact_on_affine_integrands(
        p in -100.0f64..100.0,
        q in -100.0f64..100.0,
        size in 0.1f64..10.0,
        m in 16usize..200,
        dim in 1usize..=4,
    ) {
        let d = Domain::new(DomainSpec::ball(size, dim, m)).unwrap();
        let f = d.field_from_fn(|r| p + q * r);
        let n = dim as f64;
        let sphere_area = d.boundary_measure / size.powi(dim as i32 - 1);
        let const_part = sphere_area * p * size.powf(n) / n;
        let slope_part = sphere_area * q * size.powf(n + 1.0) / (n + 1.0);
        let exact = const_part + slope_part;
        // Scale by the non-cancelling magnitude: p and q can conspire to
        // make the integral itself tiny.
        let scale = const_part.abs() + slope_part.abs() + 1e-12;
        let got = d.integrate(&f).unwrap();
        prop_assert!(
            (got - exact).abs() <= 1e-10 * scale,
            "ball quadrature off: got {got}, exact {exact}"
        );

        let d = Domain::new(DomainSpec::interval(size, m)).unwrap();
        let f = d.field_from_fn(|x| p + q * x);
        let exact = 2.0 * p * size;
        let scale = 2.0 * size * (p.abs() + q.abs()) + 1e-12;
        let got = d.integrate(&f).unwrap();
        prop_assert!(
            (got - exact).abs() <= 1e-10 * scale,
            "interval quadrature off: got {got}, exact {exact}"
        );
    }

    // The Poisson solve is direct, so its residual sits at roundoff level,
    // not truncation level. Forming the second difference of the solution
    // amplifies node roundoff by about 1/h^2, so the enforceable contract
    // is 1e-12 on coarse grids widening into the epsilon m^2 envelope.
    #[test]
    fn poisson_residual_stays_at_roundoff(
        c0 in -5.0f64..5.0,
        c1 in -5.0f64..5.0,
        c2 in -5.0f64..5.0,
        m in 16usize..=96,
        ball in proptest::bool::ANY,
    ) {
        let d = if ball {
            Domain::new(DomainSpec::ball(1.0, 2, m)).unwrap()
        } else {
            Domain::new(DomainSpec::interval(1.0, m)).unwrap()
        };
        let rhs = d.field_from_fn(|x| c0 + c1 * x + c2 * (3.0 * x).sin());
        let g = d.solve_poisson(&rhs).unwrap();
        let lap = d.apply_laplacian(&g).unwrap();
        let scale = rhs.max_abs().max(1e-12);
        let envelope = 1e-12f64.max(4.0 * f64::EPSILON * (m * m) as f64);
        for j in d.interior_indices() {
            let resid = (-lap.values[j] - rhs.values[j]).abs();
            prop_assert!(
                resid <= envelope * scale,
                "poisson residual {resid} at node {j} (m = {m})"
            );
        }
    }
}

#[test]
fn poisson_residual_grows_no_faster_than_roundoff_amplification() {
    let d = Domain::new(DomainSpec::ball(1.0, 2, 512)).unwrap();
    let rhs = d.field_from_fn(|x| 5.0 - 3.0 * x + 2.0 * (3.0 * x).sin());
    let g = d.solve_poisson(&rhs).unwrap();
    let lap = d.apply_laplacian(&g).unwrap();
    let scale = rhs.max_abs();
    let amplification = f64::EPSILON * 512.0 * 512.0;
    for j in d.interior_indices() {
        let resid = (-lap.values[j] - rhs.values[j]).abs();
        assert!(
            resid <= amplification * scale,
            "residual {resid} above the roundoff envelope at node {j}"
        );
    }
}

#[test]
fn laplacian_is_self_adjoint_on_vanishing_fields() {
    // On the interval the weighted operator is symmetric entry by entry, so
    // the identity holds to roundoff. On the ball every generic row is
    // symmetric too (the hat-moment weights turn the radial stencil into
    // the divergence form), and the one asymmetric pair, center row against
    // its neighbor, carries an O(h^2) defect: resolve until it is below the
    // contract level.
    let defect = |d: &Domain| {
        let f = d.field_from_fn(|x| (1.0 - x * x) * (2.0 * x).cos());
        let g = d.field_from_fn(|x| (1.0 - x * x) * (0.5 + x * x));
        let lf = d.apply_laplacian(&f).unwrap();
        let lg = d.apply_laplacian(&g).unwrap();
        let a = d.integrate_map2(&f, &lg, |x, y| x * y).unwrap();
        let b = d.integrate_map2(&g, &lf, |x, y| x * y).unwrap();
        (a - b).abs() / a.abs().max(b.abs())
    };

    let interval = Domain::new(DomainSpec::interval(1.0, 512)).unwrap();
    let got = defect(&interval);
    assert!(got <= 1e-12, "interval defect {got}");

    let witness = Domain::new(DomainSpec::ball(1.0, 2, 65_536)).unwrap();
    let got = defect(&witness);
    assert!(got <= 1e-8, "ball defect {got} at the witness resolution");

    // The defect is a discretization artifact, so it must fall second order.
    let coarse = defect(&Domain::new(DomainSpec::ball(1.0, 2, 2048)).unwrap());
    let fine = defect(&Domain::new(DomainSpec::ball(1.0, 2, 4096)).unwrap());
    assert!(fine > 0.0, "defect vanished, ratio undefined");
    let ratio = coarse / fine;
    assert!(
        (3.5..=4.5).contains(&ratio),
        "defect ratio {ratio} is not second order (coarse {coarse}, fine {fine})"
    );
}
