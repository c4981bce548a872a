//! Time evolution of the nonlocal membrane equation.
//!
//! The initial-boundary value problem
//!
//! ```text
//! u_t = Laplacian u + lambda / [ (1 - u)^2 (1 + chi int_Omega dy/(1 - u))^2 ]
//! u = 0 on the boundary,   u(., 0) = u0,   0 <= u0 <= a < 1
//! ```
//!
//! is stepped by a first-order IMEX scheme: backward Euler for the
//! diffusion (one tridiagonal solve per step), explicit evaluation of the
//! nonlocal reaction at the previous state. Stiffness lives in the
//! diffusion, so this combination is unconditionally stable away from the
//! touchdown singularity; near it the step size is controlled by an
//! explicit prediction of where the reaction would push the sup.
//!
//! A run ends in one of three ways: the state stops moving (steady limit),
//! the sup crosses 1 - quench_tol (touchdown, reported with a one-step
//! bracket and a power-law extrapolation of the touchdown time), or the
//! time horizon runs out.

use crate::error::{Error, Result};
use crate::geometry::{DiscreteField, Domain};
use crate::steady_nonlocal::NonlocalSolution;
use crate::tridiag::TridiagonalFactor;

/// Knobs for [`evolve`]. Construct with [`EvolveOptions::new`] to pick up
/// the default tolerances.
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    /// Initial and maximal time step.
    pub dt_init: f64,
    /// Evolution horizon.
    pub t_max: f64,
    /// Touchdown is declared when sup u >= 1 - quench_tol.
    pub quench_tol: f64,
    /// Steady state is declared when the step rate ||u_t||_inf stays below
    /// this for ten consecutive samples.
    pub steady_tol: f64,
    /// Record a sample every this many accepted steps.
    pub sample_stride: usize,
}

impl EvolveOptions {
    pub fn new(dt_init: f64, t_max: f64) -> Self {
        EvolveOptions {
            dt_init,
            t_max,
            quench_tol: 1e-3,
            steady_tol: 1e-8,
            sample_stride: 1,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = self.dt_init > 0.0
            && self.dt_init.is_finite()
            && self.t_max > 0.0
            && self.t_max.is_finite()
            && self.quench_tol > 0.0
            && self.quench_tol < 0.5
            && self.steady_tol > 0.0
            && self.sample_stride >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("bad evolve options: {self:?}")))
        }
    }
}

/// How an evolution ended.
#[derive(Debug, Clone, PartialEq)]
pub enum EvolutionStatus {
    /// The state stopped moving at the given time.
    ConvergedToSteady(f64),
    /// sup u crossed 1 - quench_tol inside `bracket` (one step wide);
    /// `t_quench` extrapolates the cube of the gap 1 - sup u to zero,
    /// estimating the actual touchdown time just past the bracket.
    Quenched { t_quench: f64, bracket: (f64, f64) },
    /// t_max was reached with the state still in motion.
    HorizonReached,
}

/// Run parameters echoed into the result, enough to interpret tolerances.
#[derive(Debug, Clone)]
pub struct EvolveParams {
    pub lambda: f64,
    pub chi: f64,
    pub domain_id: u64,
    pub u0_descriptor: String,
    pub dt_init: f64,
    pub h: f64,
}

/// Sampled history of one evolution.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub sup_u: Vec<f64>,
    pub snapshots: Vec<(f64, DiscreteField)>,
    pub status: EvolutionStatus,
    pub params: EvolveParams,
}

impl EvolutionResult {
    pub fn final_state(&self) -> &DiscreteField {
        &self.snapshots.last().expect("evolution stores t=0").1
    }

    /// Comparison tolerance of this run, 10 (dt + h^2).
    pub fn tolerance(&self) -> f64 {
        10.0 * (self.params.dt_init + self.params.h * self.params.h)
    }
}

/// Nodewise comparison of two runs over their shared sample prefix.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    /// lo <= hi + tol held at every compared node and sample.
    pub ordered: bool,
    /// max over samples and nodes of (lo - hi), negative when ordered
    /// strictly.
    pub max_violation: f64,
    pub samples_compared: usize,
    pub tol: f64,
}

fn check_run_params(chi: f64, lambda: f64) -> Result<()> {
    if !chi.is_finite() || chi < 0.0 {
        return Err(Error::InvalidParams(format!(
            "chi must be nonnegative, got {chi}"
        )));
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParams(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    Ok(())
}

/// The nonlocal reaction lambda / ((1-u)^2 (1 + chi int dy/(1-u))^2) on
/// interior nodes. Assumes u < 1 everywhere (the caller keeps the state
/// below the touchdown guard).
fn reaction(d: &Domain, chi: f64, lambda: f64, u: &DiscreteField) -> Result<Vec<f64>> {
    let denom_int = d.integrate_map(u, |v| 1.0 / (1.0 - v))?;
    let bracket = 1.0 + chi * denom_int;
    let scale = lambda / (bracket * bracket);
    Ok(d
        .interior_indices()
        .map(|j| {
            let g = 1.0 - u.values[j];
            scale / (g * g)
        })
        .collect())
}

/// True when the nodal data has a jump no smooth profile at this
/// resolution would produce. Such data gets one implicit smoothing step of
/// size h^2 before the evolution proper.
fn has_jump(u: &DiscreteField) -> bool {
    u.values.windows(2).any(|w| (w[1] - w[0]).abs() > 0.2)
}

/// Least-squares extrapolation of the touchdown time: fits
/// (1 - sup u)^3 = a + b t over the recent trail and returns the zero
/// crossing, clamped to stay past the bracket. The cube matches the local
/// balance u_t ~ lambda/(1-u)^2 near touchdown.
fn extrapolate_quench(trail: &[(f64, f64)], t_hi: f64) -> f64 {
    if trail.len() < 2 {
        return t_hi;
    }
    let n = trail.len() as f64;
    let (mut st, mut sg, mut stt, mut stg) = (0.0, 0.0, 0.0, 0.0);
    for &(t, gap) in trail {
        let g3 = gap * gap * gap;
        st += t;
        sg += g3;
        stt += t * t;
        stg += t * g3;
    }
    let det = n * stt - st * st;
    if det.abs() < 1e-300 {
        return t_hi;
    }
    let slope = (n * stg - st * sg) / det;
    let intercept = (sg - slope * st) / n;
    if slope >= 0.0 {
        return t_hi;
    }
    (-intercept / slope).max(t_hi)
}

/// Evolve the nonlocal equation from u0 until steady state, touchdown, or
/// t_max.
pub fn evolve(
    d: &Domain,
    chi: f64,
    lambda: f64,
    u0: &DiscreteField,
    opts: &EvolveOptions,
) -> Result<EvolutionResult> {
    opts.validate()?;
    check_run_params(chi, lambda)?;
    d.check_bound(u0)?;
    if !u0.is_finite() {
        return Err(Error::InvalidInitialData("u0 has non-finite nodes".into()));
    }
    if u0.values.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidInitialData("u0 must be nonnegative".into()));
    }
    if u0.sup() >= 1.0 - opts.quench_tol {
        return Err(Error::InvalidInitialData(format!(
            "u0 starts at sup {} inside the touchdown guard",
            u0.sup()
        )));
    }

    let mut u = u0.clone();
    let mut descriptor = if u.max_abs() == 0.0 {
        "zero".to_string()
    } else {
        format!("sup={:.6}", u.sup())
    };

    let op = d.neg_laplacian();
    let factor_for = |dt: f64| -> Result<TridiagonalFactor> { op.scaled(dt).shifted(1.0).factor() };

    if has_jump(&u) {
        let h2 = d.h * d.h;
        let smoothing = factor_for(h2)?;
        let smoothed = smoothing.solve(&d.pack_interior(&u));
        u = d.unpack_interior(&smoothed);
        descriptor.push_str("+smoothed");
    }

    let params = EvolveParams {
        lambda,
        chi,
        domain_id: d.id(),
        u0_descriptor: descriptor,
        dt_init: opts.dt_init,
        h: d.h,
    };

    let mut times = vec![0.0];
    let mut sup_u = vec![u.sup()];
    let mut snapshots = vec![(0.0, u.clone())];

    let quench_guard = 1.0 - opts.quench_tol;
    let halve_guard = 1.0 - 0.5 * opts.quench_tol;
    let dt_floor = opts.dt_init * 1e-9;

    let mut dt = opts.dt_init;
    let mut factor = factor_for(dt)?;
    let mut factor_dt = dt;

    let mut t = 0.0;
    let mut steps: usize = 0;
    let mut smooth_streak: usize = 0;
    let mut calm_samples: usize = 0;
    // Recent (t, 1 - sup u) pairs feeding the touchdown extrapolation.
    let mut trail: Vec<(f64, f64)> = Vec::with_capacity(8);

    let status = loop {
        if t >= opts.t_max * (1.0 - 1e-14) {
            break EvolutionStatus::HorizonReached;
        }

        let f = reaction(d, chi, lambda, &u)?;
        let interior = d.pack_interior(&u);

        // Halve dt while the explicit reaction alone would push the sup
        // into the touchdown guard band.
        loop {
            let predicted = interior
                .iter()
                .zip(&f)
                .map(|(ui, fi)| ui + dt * fi)
                .fold(f64::NEG_INFINITY, f64::max);
            if predicted <= halve_guard || dt <= dt_floor {
                break;
            }
            dt *= 0.5;
            smooth_streak = 0;
        }

        let dt_step = dt.min(opts.t_max - t);
        if dt_step != factor_dt {
            factor = factor_for(dt_step)?;
            factor_dt = dt_step;
        }

        let rhs: Vec<f64> = interior
            .iter()
            .zip(&f)
            .map(|(ui, fi)| ui + dt_step * fi)
            .collect();
        let next = factor.solve(&rhs);

        let mut rate = 0.0_f64;
        for (a, b) in next.iter().zip(&interior) {
            if !a.is_finite() {
                return Err(Error::NonFiniteState { t });
            }
            rate = rate.max((a - b).abs());
        }
        rate /= dt_step;

        u = d.unpack_interior(&next);
        t += dt_step;
        steps += 1;
        let sup = u.sup();

        if trail.len() == 8 {
            trail.remove(0);
        }
        trail.push((t, 1.0 - sup));

        if sup >= quench_guard {
            times.push(t);
            sup_u.push(sup);
            snapshots.push((t, u.clone()));
            let bracket = (t - dt_step, t);
            break EvolutionStatus::Quenched {
                t_quench: extrapolate_quench(&trail, t),
                bracket,
            };
        }

        smooth_streak += 1;
        if smooth_streak >= 20 && dt < opts.dt_init {
            dt = (2.0 * dt).min(opts.dt_init);
            smooth_streak = 0;
        }

        let horizon_hit = t >= opts.t_max * (1.0 - 1e-14);
        if steps % opts.sample_stride == 0 || horizon_hit {
            times.push(t);
            sup_u.push(sup);
            snapshots.push((t, u.clone()));
            if rate <= opts.steady_tol {
                calm_samples += 1;
            } else {
                calm_samples = 0;
            }
            if calm_samples >= 10 {
                break EvolutionStatus::ConvergedToSteady(t);
            }
        }
    };

    if *times.last().expect("t=0 sample") < t {
        times.push(t);
        sup_u.push(u.sup());
        snapshots.push((t, u));
    }

    Ok(EvolutionResult {
        times,
        sup_u,
        snapshots,
        status,
        params,
    })
}

/// Nodewise order check lo <= hi over the shared sample-time prefix.
///
/// The runs must live on the same domain and agree on at least two leading
/// sample times; the comparison tolerance is 10 (dt + h^2) of the coarser
/// run. The caller is responsible for the runs actually forming a
/// comparison pair (ordered data under a common forcing majorant); this
/// routine only measures the order.
pub fn assert_comparison(lo: &EvolutionResult, hi: &EvolutionResult) -> Result<ComparisonReport> {
    if lo.params.domain_id != hi.params.domain_id {
        return Err(Error::IncompatibleRuns(
            "runs live on different domains".into(),
        ));
    }
    let mut shared = 0;
    for (ta, tb) in lo.times.iter().zip(&hi.times) {
        if (ta - tb).abs() > 1e-12 * ta.abs().max(1.0) {
            break;
        }
        shared += 1;
    }
    if shared < 2 {
        return Err(Error::IncompatibleRuns(format!(
            "runs share only {shared} sample times"
        )));
    }

    let tol = lo.tolerance().max(hi.tolerance());
    let mut max_violation = f64::NEG_INFINITY;
    for k in 0..shared {
        let a = &lo.snapshots[k].1;
        let b = &hi.snapshots[k].1;
        for (va, vb) in a.values.iter().zip(&b.values) {
            max_violation = max_violation.max(va - vb);
        }
    }
    Ok(ComparisonReport {
        ordered: max_violation <= tol,
        max_violation,
        samples_compared: shared,
        tol,
    })
}

/// Distance of a converged run's final state from a steady target.
pub fn steady_limit_check(res: &EvolutionResult, target: &NonlocalSolution) -> Result<f64> {
    match res.status {
        EvolutionStatus::ConvergedToSteady(_) => res.final_state().max_diff(&target.v),
        _ => Err(Error::NotConverged),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::spectral::principal_eigenpair;
    use crate::steady_local::minimal_solution;
    use crate::steady_nonlocal::solve_nonlocal_steady;

    fn interval(res: usize) -> Domain {
        Domain::new(DomainSpec::interval(1.0, res)).unwrap()
    }

    #[test]
    fn zero_data_zero_forcing_stays_flat() {
        let d = interval(64);
        let opts = EvolveOptions::new(1e-3, 0.5).with_stride(10);
        let res = evolve(&d, 0.0, 0.0, &d.zero_field(), &opts).unwrap();
        assert!(matches!(res.status, EvolutionStatus::ConvergedToSteady(_)));
        assert!(res.sup_u.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn eigenfunction_decays_at_the_principal_rate() {
        let d = interval(256);
        let eig = principal_eigenpair(&d).unwrap();
        let scale = 0.5 / eig.phi1.sup();
        let u0 = d
            .field_from_values(eig.phi1.values.iter().map(|&v| scale * v).collect())
            .unwrap();
        let opts = EvolveOptions::new(1e-3, 1.6).with_stride(25);
        let res = evolve(&d, 0.0, 0.0, &u0, &opts).unwrap();
        for (t, s) in res.times.iter().zip(&res.sup_u) {
            if *t < 0.5 || *t > 1.5 {
                continue;
            }
            let expected = 0.5 * (-eig.mu1 * t).exp();
            assert!(
                (s - expected).abs() <= 0.02 * expected,
                "sup {s} vs {expected} at t={t}"
            );
        }
    }

    #[test]
    fn subthreshold_run_converges_under_the_sup_bound() {
        let d = interval(128);
        let opts = EvolveOptions::new(1e-3, 30.0).with_stride(20);
        let res = evolve(&d, 1.0, 0.5, &d.zero_field(), &opts).unwrap();
        assert!(
            matches!(res.status, EvolutionStatus::ConvergedToSteady(_)),
            "status {:?}",
            res.status
        );
        // sqrt(2 lambda |Omega| / (chi (1 + chi |Omega|))) with lambda 0.5,
        // |Omega| 2, chi 1.
        let bound = (2.0_f64 / 3.0).sqrt();
        for &s in &res.sup_u {
            assert!(s <= bound + 5e-3, "sup {s} above {bound}");
        }
    }

    #[test]
    fn limit_matches_the_nonlocal_steady_state() {
        let d = interval(128);
        let target = solve_nonlocal_steady(&d, 1.0, 0.3).unwrap();
        let opts = EvolveOptions::new(1e-3, 30.0).with_stride(20);
        let res = evolve(&d, 1.0, 0.3, &d.zero_field(), &opts).unwrap();
        let dev = steady_limit_check(&res, &target).unwrap();
        assert!(dev <= 1e-4, "deviation {dev}");
    }

    #[test]
    fn steady_data_is_a_fixed_point() {
        let d = interval(96);
        let sol = solve_nonlocal_steady(&d, 1.0, 0.3).unwrap();
        let opts = EvolveOptions::new(1e-3, 1.0).with_stride(10);
        let res = evolve(&d, 1.0, 0.3, &sol.v, &opts).unwrap();
        for (t, snap) in &res.snapshots {
            let dev = snap.max_diff(&sol.v).unwrap();
            assert!(dev <= 1e-6, "drift {dev} at t={t}");
        }
    }

    #[test]
    fn steady_limit_check_requires_convergence() {
        let d = interval(64);
        let sol = solve_nonlocal_steady(&d, 1.0, 0.3).unwrap();
        let opts = EvolveOptions::new(1e-3, 0.05).with_stride(10);
        let res = evolve(&d, 1.0, 0.3, &d.zero_field(), &opts).unwrap();
        assert!(matches!(res.status, EvolutionStatus::HorizonReached));
        assert!(matches!(
            steady_limit_check(&res, &sol),
            Err(Error::NotConverged)
        ));
    }

    #[test]
    fn identical_runs_compare_with_zero_violation() {
        let d = interval(64);
        let opts = EvolveOptions::new(1e-3, 0.3).with_stride(10);
        let a = evolve(&d, 1.0, 0.4, &d.zero_field(), &opts).unwrap();
        let b = evolve(&d, 1.0, 0.4, &d.zero_field(), &opts).unwrap();
        let rep = assert_comparison(&a, &b).unwrap();
        assert!(rep.ordered);
        assert_eq!(rep.max_violation, 0.0);
        assert_eq!(rep.samples_compared, a.times.len());
    }

    #[test]
    fn heat_flow_preserves_initial_order() {
        let d = interval(64);
        let opts = EvolveOptions::new(1e-3, 0.5).with_stride(10);
        let lo = evolve(&d, 0.0, 0.0, &d.zero_field(), &opts).unwrap();
        let bump = d.field_from_fn(|x| 0.1 * (1.0 - x * x));
        let hi = evolve(&d, 0.0, 0.0, &bump, &opts).unwrap();
        let rep = assert_comparison(&lo, &hi).unwrap();
        assert!(rep.ordered, "violation {}", rep.max_violation);
    }

    #[test]
    fn evolution_stays_below_a_steady_supersolution() {
        let d = interval(96);
        let chi = 1.0;
        let lambda = 0.45;
        // Any mu0 >= lambda / (1 + chi |Omega|)^2 = 0.05 freezes a steady
        // supersolution; w_{0.2} leaves comfortable room.
        let mu0 = 0.2;
        let w = minimal_solution(&d, mu0).unwrap();
        let opts = EvolveOptions::new(1e-3, 4.0).with_stride(10);
        let lo = evolve(&d, chi, lambda, &d.zero_field(), &opts).unwrap();
        // The majorant run sits at its fixed point; a tighter steady_tol
        // keeps it sampling over the whole shared horizon.
        let mut opts_hi = opts.clone();
        opts_hi.steady_tol = 1e-12;
        let hi = evolve(&d, 0.0, mu0, &w, &opts_hi).unwrap();
        let rep = assert_comparison(&lo, &hi).unwrap();
        assert!(rep.ordered, "violation {}", rep.max_violation);
    }

    #[test]
    fn growth_from_zero_is_monotone_and_nonnegative() {
        let d = interval(96);
        let opts = EvolveOptions::new(1e-3, 2.0).with_stride(10);
        let res = evolve(&d, 0.5, 0.8, &d.zero_field(), &opts).unwrap();
        for pair in res.sup_u.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12, "sup decreased: {pair:?}");
        }
        for (_, snap) in &res.snapshots {
            assert!(snap.values.iter().all(|&v| v >= -1e-12));
        }
    }

    #[test]
    fn supercritical_run_quenches_with_a_tight_bracket() {
        let d = interval(96);
        let opts = EvolveOptions::new(1e-3, 5.0).with_stride(10);
        let res = evolve(&d, 0.4, 5.0, &d.zero_field(), &opts).unwrap();
        match res.status {
            EvolutionStatus::Quenched { t_quench, bracket } => {
                assert!(bracket.1 - bracket.0 <= opts.dt_init + 1e-15);
                assert!(t_quench >= bracket.1);
                assert!(t_quench < 5.0, "t_quench {t_quench}");
            }
            other => panic!("expected quench, got {other:?}"),
        }
        assert!(res.sup_u.iter().all(|&s| s < 1.0));
    }

    #[test]
    fn halved_step_roughly_halves_the_time_error() {
        let d = interval(64);
        let run = |dt: f64| {
            let opts = EvolveOptions::new(dt, 1.0).with_stride(1000);
            evolve(&d, 1.0, 0.6, &d.zero_field(), &opts).unwrap()
        };
        let coarse = run(2e-3);
        let fine = run(1e-3);
        let reference = run(2.5e-4);
        let e_coarse = coarse
            .final_state()
            .max_diff(reference.final_state())
            .unwrap();
        let e_fine = fine.final_state().max_diff(reference.final_state()).unwrap();
        // First order against an 8x finer reference gives the ratio
        // (8 - 1)/(4 - 1) ~ 2.33; allow a wide band around it.
        let ratio = e_coarse / e_fine;
        assert!((1.7..=3.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn close_data_stays_close_in_l1() {
        let d = interval(64);
        let opts = EvolveOptions::new(1e-3, 1.0).with_stride(10);
        let a = evolve(&d, 1.0, 0.5, &d.zero_field(), &opts).unwrap();
        let bump = d.field_from_fn(|x| 0.05 * (1.0 - x * x));
        let b = evolve(&d, 1.0, 0.5, &bump, &opts).unwrap();
        let l1 = |x: &DiscreteField, y: &DiscreteField| {
            let diff = d
                .field_from_values(
                    x.values
                        .iter()
                        .zip(&y.values)
                        .map(|(p, q)| (p - q).abs())
                        .collect(),
                )
                .unwrap();
            d.integrate(&diff).unwrap()
        };
        let start = l1(&a.snapshots[0].1, &b.snapshots[0].1);
        let end = l1(a.final_state(), b.final_state());
        assert!(end <= 3.0 * start, "L1 grew from {start} to {end}");
    }

    #[test]
    fn discontinuous_data_is_smoothed_before_stepping() {
        let d = interval(128);
        let step = d.field_from_fn(|x| if x.abs() < 0.3 { 0.5 } else { 0.0 });
        let raw_jump = step
            .values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        let opts = EvolveOptions::new(1e-3, 0.1).with_stride(10);
        let res = evolve(&d, 0.5, 0.2, &step, &opts).unwrap();
        assert!(res.params.u0_descriptor.contains("smoothed"));
        let smoothed_jump = res.snapshots[0]
            .1
            .values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        assert!(
            smoothed_jump < raw_jump,
            "jump {raw_jump} not reduced ({smoothed_jump})"
        );
    }

    #[test]
    fn invalid_data_is_rejected() {
        let d = interval(64);
        let opts = EvolveOptions::new(1e-3, 1.0);
        let neg = d.field_from_fn(|x| -0.1 * (1.0 - x * x));
        assert!(matches!(
            evolve(&d, 0.5, 0.5, &neg, &opts),
            Err(Error::InvalidInitialData(_))
        ));
        let tall = d.field_from_fn(|x| 0.9995 * (1.0 - x * x));
        assert!(matches!(
            evolve(&d, 0.5, 0.5, &tall, &opts),
            Err(Error::InvalidInitialData(_))
        ));
        let other = interval(32);
        assert!(matches!(
            evolve(&d, 0.5, 0.5, &other.zero_field(), &opts),
            Err(Error::DomainMismatch)
        ));
        let bad_opts = EvolveOptions::new(-1.0, 1.0);
        assert!(matches!(
            evolve(&d, 0.5, 0.5, &d.zero_field(), &bad_opts),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn mismatched_sample_grids_are_rejected() {
        let d = interval(64);
        let a = evolve(
            &d,
            0.0,
            0.0,
            &d.zero_field(),
            &EvolveOptions::new(1e-3, 0.2).with_stride(10),
        )
        .unwrap();
        let b = evolve(
            &d,
            0.0,
            0.0,
            &d.zero_field(),
            &EvolveOptions::new(2e-3, 0.2).with_stride(10),
        )
        .unwrap();
        assert!(matches!(
            assert_comparison(&a, &b),
            Err(Error::IncompatibleRuns(_))
        ));
    }
}
