//! The acceptance suite behind `verify-all`.
//!
//! Eleven numbered gates, each exercising one slice of the library against
//! an independent reference: closed-form eigenvalues, a shooting-method
//! oracle for the pull-in fold, grid-refinement order checks, explicit
//! existence bounds, energy identities, and invariant-region theorems for
//! the flow. A gate either passes, fails with the first broken inequality
//! spelled out, or fails because a solver returned an error.
//!
//! Every gate is deterministic: fixed seeds, fixed grids, fixed steps.
//! Timing budgets are enforced where an interactive workflow depends on
//! them, but elapsed times never appear in pass details so that repeated
//! runs serialize identically.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mems_core::{
    capacitance, energy_ledger, evolve, interval_bounds_check, minimal_solution, moment_trace,
    nonexistence_onset, picard_iterate, principal_eigenpair, pull_in_voltage,
    solve_nonlocal_steady, steady_limit_check, thresholds, DiscreteField, Domain, DomainSpec,
    EvolutionResult, EvolutionStatus, EvolveOptions,
};

use crate::config::{ExperimentConfig, InitialData, Shape};
use crate::error::{Error, Result};
use crate::experiments;
use crate::oracle::pull_in_shooting;
use crate::record::Verdict;

/// j_{0,1}^2, the principal Dirichlet eigenvalue of the unit disk.
const BESSEL_J01_SQ: f64 = 5.783185962946785;

/// Outcome of one gate.
pub struct CriterionReport {
    /// 1-based position in the suite.
    pub index: usize,
    pub name: &'static str,
    pub verdict: Verdict,
    /// What was measured (pass) or what broke (fail).
    pub detail: String,
}

/// Collects inequality checks and measurement notes for one gate.
struct Gate {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate { failures: Vec::new(), notes: Vec::new() }
    }

    /// Records a failure message when `ok` is false.
    fn require(&mut self, ok: bool, failure: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(failure());
        }
    }

    /// Adds a measurement to the pass-side detail.
    fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Enforces a wall-clock budget. The pass note is a constant string;
    /// the measured time only appears when the budget is blown.
    fn budget(&mut self, started: Instant, limit_s: f64) {
        let took = started.elapsed().as_secs_f64();
        if took < limit_s {
            self.notes.push(format!("within {limit_s:.0}s budget"));
        } else {
            self.failures.push(format!("took {took:.2}s, budget {limit_s:.0}s"));
        }
    }

    fn finish(self) -> (Verdict, String) {
        if self.failures.is_empty() {
            (Verdict::Pass, self.notes.join("; "))
        } else {
            let msg = self.failures.join("; ");
            (Verdict::fail(msg.clone()), msg)
        }
    }
}

type GateFn = fn(&Path) -> Result<Gate>;

/// Runs the whole suite. Per-gate scratch directories are created under
/// `scratch`; only the determinism gate actually writes files. Solver
/// errors inside a gate become fail verdicts, not hard errors.
pub fn run_all(scratch: &Path) -> Result<Vec<CriterionReport>> {
    let gates: [(&'static str, GateFn); 11] = [
        ("principal-eigenpair", gate_eigenpair),
        ("pull-in-voltage", gate_pull_in),
        ("nonlocal-steady-family", gate_nonlocal_family),
        ("existence-thresholds", gate_thresholds),
        ("energy-ledger", gate_energy_ledger),
        ("picard-window", gate_picard),
        ("global-convergence", gate_global_convergence),
        ("steady-sandwich", gate_sandwich),
        ("quench-dynamics", gate_quench),
        ("initial-data-stability", gate_stability),
        ("determinism", gate_determinism),
    ];
    let mut reports = Vec::with_capacity(gates.len());
    for (i, (name, gate)) in gates.iter().enumerate() {
        let index = i + 1;
        let dir = scratch.join(format!("{index:02}-{name}"));
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let (verdict, detail) = match gate(&dir) {
            Ok(g) => g.finish(),
            Err(e) => {
                let msg = e.to_string();
                (Verdict::fail(msg.clone()), msg)
            }
        };
        reports.push(CriterionReport { index, name, verdict, detail });
    }
    Ok(reports)
}

fn interval(m: usize) -> Result<Domain> {
    Ok(Domain::new(DomainSpec::interval(1.0, m))?)
}

fn ball(radius: f64, dim: usize, m: usize) -> Result<Domain> {
    Ok(Domain::new(DomainSpec::ball(radius, dim, m))?)
}

fn scaled(d: &Domain, f: &DiscreteField, s: f64) -> Result<DiscreteField> {
    Ok(d.field_from_values(f.values.iter().map(|v| s * v).collect())?)
}

/// 1: the discrete principal eigenpair against closed forms.
///
/// Interval of half-width 1: mu1 = (pi/2)^2. Unit disk: mu1 = j_{0,1}^2.
/// The eigenfunction must come back normalized to unit integral, and both
/// solves together must be fast enough for interactive use.
fn gate_eigenpair(_dir: &Path) -> Result<Gate> {
    let started = Instant::now();
    let d1 = interval(512)?;
    let e1 = principal_eigenpair(&d1)?;
    let d2 = ball(1.0, 2, 512)?;
    let e2 = principal_eigenpair(&d2)?;
    let elapsed = started;

    let mut g = Gate::new();
    let exact1 = std::f64::consts::FRAC_PI_2 * std::f64::consts::FRAC_PI_2;
    let rel1 = (e1.mu1 - exact1).abs() / exact1;
    g.require(rel1 <= 1e-3, || {
        format!("interval mu1 = {:.8} misses (pi/2)^2 by {rel1:.2e} relative", e1.mu1)
    });
    let rel2 = (e2.mu1 - BESSEL_J01_SQ).abs() / BESSEL_J01_SQ;
    g.require(rel2 <= 1e-3, || {
        format!("disk mu1 = {:.8} misses j01^2 by {rel2:.2e} relative", e2.mu1)
    });
    let mass1 = (d1.integrate(&e1.phi1)? - 1.0).abs();
    g.require(mass1 <= 1e-8, || {
        format!("interval eigenfunction integral off by {mass1:.2e}")
    });
    let mass2 = (d2.integrate(&e2.phi1)? - 1.0).abs();
    g.require(mass2 <= 1e-8, || format!("disk eigenfunction integral off by {mass2:.2e}"));
    g.budget(elapsed, 1.0);
    g.note(format!("mu1 rel err {rel1:.1e} (interval), {rel2:.1e} (disk)"));
    Ok(g)
}

/// 2: the pull-in fold against a live shooting-method oracle.
///
/// The oracle integrates the radial profile ODE outward from prescribed
/// center heights and never touches the finite-difference stack, so
/// agreement pins the fold location independently. Doubling the ball
/// radius in two dimensions must divide the fold voltage by exactly four.
fn gate_pull_in(_dir: &Path) -> Result<Gate> {
    let started = Instant::now();
    let oracle_slab = pull_in_shooting(1, 1.0)?;
    let oracle_disk = pull_in_shooting(2, 1.0)?;

    let fd_slab = pull_in_voltage(&interval(256)?)?.lambda_star;
    let fd_disk = pull_in_voltage(&ball(1.0, 2, 256)?)?.lambda_star;
    let fd_disk2 = pull_in_voltage(&ball(2.0, 2, 512)?)?.lambda_star;

    let mut g = Gate::new();
    let rel_slab = (fd_slab - oracle_slab.lambda_star).abs() / oracle_slab.lambda_star;
    g.require(rel_slab <= 1e-3, || {
        format!(
            "interval fold {fd_slab:.8} vs shooting {:.8}, off {rel_slab:.2e}",
            oracle_slab.lambda_star
        )
    });
    let rel_disk = (fd_disk - oracle_disk.lambda_star).abs() / oracle_disk.lambda_star;
    g.require(rel_disk <= 1e-3, || {
        format!(
            "disk fold {fd_disk:.8} vs shooting {:.8}, off {rel_disk:.2e}",
            oracle_disk.lambda_star
        )
    });
    // lambda scales like 1/R^2 in the local problem, exactly.
    let rel_scale = (4.0 * fd_disk2 - fd_disk).abs() / fd_disk;
    g.require(rel_scale <= 1e-3, || {
        format!("radius-2 disk fold {fd_disk2:.8} breaks the 1/R^2 scaling by {rel_scale:.2e}")
    });
    g.budget(started, 30.0);
    g.note(format!(
        "fold rel err {rel_slab:.1e} (interval), {rel_disk:.1e} (disk), scaling defect {rel_scale:.1e}"
    ));
    Ok(g)
}

/// Max-norm residual of the discrete nonlocal steady equation on `d`,
/// evaluated at the restriction of a reference profile computed on a much
/// finer nested grid. Because the restricted profile solves the equation
/// only up to truncation error, this isolates the O(h^2) consistency of
/// the coarse operator; solving on the coarse grid itself would instead
/// measure the root-finder tolerance.
fn truncation_residual(
    d: &Domain,
    ref_d: &Domain,
    v_ref: &DiscreteField,
    chi: f64,
    lambda: f64,
) -> Result<f64> {
    let stride = (ref_d.spec.resolution + 1) / (d.spec.resolution + 1);
    let values: Vec<f64> = d
        .nodes
        .iter()
        .enumerate()
        .map(|(j, _)| v_ref.values[j * stride])
        .collect();
    let v = d.field_from_values(values)?;
    let lap = d.apply_laplacian(&v)?;
    let cap = capacitance(d, &v)?;
    let bracket = 1.0 + chi * cap;
    let scale = lambda / (bracket * bracket);
    let mut worst = 0.0_f64;
    for j in d.interior_indices() {
        let gap = 1.0 - v.values[j];
        worst = worst.max((lap.values[j] + scale / (gap * gap)).abs());
    }
    Ok(worst)
}

/// 3: the scalar reduction of the nonlocal steady problem, randomized.
///
/// Twenty (chi, lambda) pairs drawn inside the guaranteed existence band
/// of every grid in play. Each solve must return a root of the increasing
/// scalar map to near machine precision, and the equation residual of a
/// fine-grid reference restricted to nested coarse grids must shrink by
/// about 4x per doubling, confirming second-order consistency.
fn gate_nonlocal_family(_dir: &Path) -> Result<Gate> {
    // Interval grids nest when the node count doubles: resolutions
    // 31 -> 63 -> 127 share nodes with 1023.
    let coarse: Vec<Domain> = [31usize, 63, 127]
        .iter()
        .map(|&m| interval(m))
        .collect::<Result<_>>()?;
    let work = interval(127)?;
    let reference = interval(1023)?;

    let mut folds = Vec::new();
    for d in coarse.iter().chain([&work, &reference]) {
        folds.push(pull_in_voltage(d)?.lambda_star);
    }
    let fold_min = folds.iter().cloned().fold(f64::INFINITY, f64::min);
    let vol = work.volume;

    let mut rng = ChaCha8Rng::seed_from_u64(0x6d656d73);
    let mut g = Gate::new();
    let mut worst_root = 0.0_f64;
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi = 0.0_f64;
    for pair in 0..20 {
        let chi: f64 = rng.gen_range(0.1..=2.0);
        let frac: f64 = rng.gen_range(0.05..=0.85);
        // Below lambda*(1 + chi |Omega|)^2 a solution exists on every grid.
        let bracket = 1.0 + chi * vol;
        let lambda = frac * fold_min * bracket * bracket;

        let sol = solve_nonlocal_steady(&work, chi, lambda)?;
        let root_residual =
            (mems_core::h_map(&work, chi, sol.mu_root)? - lambda).abs() / lambda.max(1.0);
        worst_root = worst_root.max(root_residual);
        g.require(root_residual <= 1e-8, || {
            format!(
                "pair {pair} (chi={chi:.4}, lambda={lambda:.4}): root residual {root_residual:.2e}"
            )
        });

        let v_ref = solve_nonlocal_steady(&reference, chi, lambda)?.v;
        let mut residuals = Vec::new();
        for d in &coarse {
            residuals.push(truncation_residual(d, &reference, &v_ref, chi, lambda)?);
        }
        for w in residuals.windows(2) {
            let ratio = w[0] / w[1];
            ratio_lo = ratio_lo.min(ratio);
            ratio_hi = ratio_hi.max(ratio);
            g.require((3.5..=4.5).contains(&ratio), || {
                format!(
                    "pair {pair} (chi={chi:.4}, lambda={lambda:.4}): residual ratio {ratio:.3} outside [3.5, 4.5]"
                )
            });
        }
    }
    g.note(format!(
        "20 pairs: worst root residual {worst_root:.1e}, refinement ratios in [{ratio_lo:.3}, {ratio_hi:.3}]"
    ));
    Ok(g)
}

/// 4: the existence band on the unit disk, three coupling strengths.
///
/// The guaranteed-existence corner lambda* (1 + chi |Omega|)^2 must sit
/// below the fold of the nonlocal branch, the fold below the observed
/// onset of nonexistence, and the onset below the closed-form convex
/// upper bound; at chi = 0.1 that bound is pinned to its known value.
fn gate_thresholds(_dir: &Path) -> Result<Gate> {
    let d = ball(1.0, 2, 256)?;
    let mut g = Gate::new();
    let mut pinned = f64::NAN;
    for &chi in &[0.05, 0.1, 0.2] {
        let rep = thresholds(&d, chi)?;
        let onset = nonexistence_onset(&d, chi)?;
        let bracket = 1.0 + chi * d.volume;
        let guaranteed = rep.lambda_star_local * bracket * bracket;
        let convex = rep.upper_bound_convex.ok_or_else(|| {
            Error::Config("convex bound missing on a ball domain".into())
        })?;
        // The fold and the onset coincide in the limit, so ordering checks
        // get a hair of slack for the two independent solves.
        let slack = 1e-6 * onset.max(1.0);
        g.require(guaranteed <= rep.lambda_star_nonlocal + slack, || {
            format!(
                "chi={chi}: guaranteed corner {guaranteed:.6} above the fold {:.6}",
                rep.lambda_star_nonlocal
            )
        });
        g.require(rep.lambda_star_nonlocal <= onset + slack, || {
            format!(
                "chi={chi}: fold {:.6} above the nonexistence onset {onset:.6}",
                rep.lambda_star_nonlocal
            )
        });
        g.require(onset <= convex + slack, || {
            format!("chi={chi}: onset {onset:.6} above the convex bound {convex:.6}")
        });
        if chi == 0.1 {
            pinned = convex;
            let err = (convex - 3.4540).abs();
            g.require(err <= 1e-3, || {
                format!("chi=0.1 convex bound {convex:.5} misses 3.4540 by {err:.2e}")
            });
        }
    }
    g.note(format!("band ordered for chi in {{0.05, 0.1, 0.2}}; chi=0.1 bound {pinned:.5}"));
    Ok(g)
}

/// 5: the energy ledger of the reference relaxation run.
///
/// From rest the Lyapunov value dissipation + Dirichlet + potential is a
/// conserved quantity of the flow, and the first two terms alone stay
/// under lambda / (chi (1 + chi |Omega|)) = 1/6 for the run below.
fn gate_energy_ledger(_dir: &Path) -> Result<Gate> {
    let started = Instant::now();
    let d = interval(128)?;
    let opts = EvolveOptions::new(1e-3, 50.0).with_stride(10);
    let res = evolve(&d, 1.0, 0.5, &d.zero_field(), &opts)?;
    let ledger = energy_ledger(&d, &res, 0.0)?;

    let mut g = Gate::new();
    let drift = ledger.max_lyapunov_drift();
    g.require(drift <= 1e-4, || format!("Lyapunov drift {drift:.2e} above 1e-4 relative"));
    let cap = 0.16667;
    let worst = ledger
        .samples
        .iter()
        .map(|s| s.dissipation_cum + s.dirichlet)
        .fold(0.0_f64, f64::max);
    g.require(worst <= cap + 1e-3, || {
        format!("dissipation + Dirichlet peak {worst:.5} above the {cap} cap")
    });
    g.budget(started, 10.0);
    g.note(format!("drift {drift:.1e}, dissipation + Dirichlet peak {worst:.5}"));
    Ok(g)
}

/// 6: Picard iteration on its guaranteed window, against the time stepper.
///
/// From u0 with sup a = 0.2 the integral-equation iterates live under the
/// ceiling (1 + a)/2 on [0, (1 - a)^3 / 16 lambda], the nonlocal iterates
/// sit below their local (chi = 0) majorants pointwise, and the converged
/// profile matches an independently stepped evolution.
fn gate_picard(_dir: &Path) -> Result<Gate> {
    let d = interval(128)?;
    let u0 = d.field_from_fn(|x| 0.2 * (1.0 - x * x));
    let (chi, lambda) = (1.0, 0.5);
    let run = picard_iterate(&d, chi, lambda, &u0, 12)?;
    let run_local = picard_iterate(&d, 0.0, lambda, &u0, 12)?;

    let mut g = Gate::new();
    let ceiling = run.a_bound;
    let mut worst_sup = 0.0_f64;
    for iterate in &run.iterates {
        for f in iterate {
            worst_sup = worst_sup.max(f.sup());
        }
    }
    g.require(worst_sup <= ceiling + 1e-12, || {
        format!("iterate sup {worst_sup:.6} above the ceiling {ceiling}")
    });

    // The local reaction dominates the nonlocal one pointwise, and the
    // heat semigroup preserves order, so every iterate is majorized.
    let mut worst_gap = f64::NEG_INFINITY;
    for (it, it_local) in run.iterates.iter().zip(&run_local.iterates) {
        for (f, f_local) in it.iter().zip(it_local) {
            for (a, b) in f.values.iter().zip(&f_local.values) {
                worst_gap = worst_gap.max(a - b);
            }
        }
    }
    g.require(worst_gap <= 1e-12, || {
        format!("a nonlocal iterate exceeds its local majorant by {worst_gap:.2e}")
    });
    g.require(run.converged_at.is_some(), || {
        "iteration did not converge within 12 sweeps".into()
    });

    let opts = EvolveOptions::new(1e-4, run.horizon_t).with_stride(1);
    let res = evolve(&d, chi, lambda, &u0, &opts)?;
    let tol = 10.0 * (1e-4 + d.h * d.h);
    let mut worst_diff = 0.0_f64;
    for (i, &t) in run.times.iter().enumerate() {
        let k = nearest_snapshot(&res, t);
        let (t_near, u) = &res.snapshots[k];
        g.require((t_near - t).abs() <= 5e-5 + 1e-12, || {
            format!("no evolution sample near t = {t:.6}")
        });
        let diff = run.final_iterate()[i].max_diff(u)?;
        worst_diff = worst_diff.max(diff);
    }
    g.require(worst_diff <= tol, || {
        format!("picard vs stepper gap {worst_diff:.2e} above {tol:.2e}")
    });
    g.note(format!(
        "ceiling margin {:.1e}, stepper gap {worst_diff:.1e} (tol {tol:.1e}), converged at sweep {}",
        ceiling - worst_sup,
        run.converged_at.unwrap_or(usize::MAX)
    ));
    Ok(g)
}

fn nearest_snapshot(res: &EvolutionResult, t: f64) -> usize {
    let mut best = 0;
    let mut gap = f64::INFINITY;
    for (k, (tk, _)) in res.snapshots.iter().enumerate() {
        let d = (tk - t).abs();
        if d < gap {
            gap = d;
            best = k;
        }
    }
    best
}

/// 7: global convergence below the interval threshold.
///
/// At chi = 1, lambda = 0.5 < 3/4 the membrane relaxes: no quench by
/// t = 50, sup u under sqrt(2/3), Dirichlet integral under 1/3, and the
/// final state lands on the steady profile computed independently.
fn gate_global_convergence(_dir: &Path) -> Result<Gate> {
    let d = interval(128)?;
    let opts = EvolveOptions::new(1e-3, 50.0).with_stride(10);
    let res = evolve(&d, 1.0, 0.5, &d.zero_field(), &opts)?;

    let mut g = Gate::new();
    g.require(!matches!(res.status, EvolutionStatus::Quenched { .. }), || {
        "run quenched below the global-existence threshold".into()
    });
    let rep = interval_bounds_check(&d, &res, 1.0, 0.5)?;
    g.require(rep.sup_max <= 0.8165 + 1e-3, || {
        format!("sup u peak {:.5} above the a priori bound 0.8165", rep.sup_max)
    });
    g.require(rep.gradient_max <= 0.3333 + 1e-3, || {
        format!("gradient energy peak {:.5} above the a priori bound 0.3333", rep.gradient_max)
    });
    let target = solve_nonlocal_steady(&d, 1.0, 0.5)?;
    let gap = steady_limit_check(&res, &target)?;
    g.require(gap <= 1e-4, || {
        format!("final state misses the steady profile by {gap:.2e}")
    });
    g.note(format!(
        "sup peak {:.5}, gradient peak {:.5}, steady gap {gap:.1e}",
        rep.sup_max, rep.gradient_max
    ));
    Ok(g)
}

/// Most negative ordering margin of a run against nodewise bounds:
/// 0 means lower <= u <= upper held exactly at every sample.
fn sandwich_gap(
    res: &EvolutionResult,
    lower: &DiscreteField,
    upper: &DiscreteField,
) -> f64 {
    let mut worst = 0.0_f64;
    for (_, u) in &res.snapshots {
        for (j, v) in u.values.iter().enumerate() {
            worst = worst.max(lower.values[j] - v);
            worst = worst.max(v - upper.values[j]);
        }
    }
    worst
}

/// 8: invariant sandwiches around steady profiles.
///
/// Four regimes where the flow provably stays between explicit steady
/// barriers. All barrier parameters are computed at run time from the
/// same-grid branch so the hypotheses of each ordering argument can be
/// verified numerically before the run is scored.
fn gate_sandwich(_dir: &Path) -> Result<Gate> {
    let d = interval(96)?;
    let chi = 1.0;
    let vol = d.volume;
    let vol_bracket = (1.0 + chi * vol).powi(2);

    let branch = pull_in_voltage(&d)?;
    let fold = branch.lambda_star;
    let w_star = branch.w_star()?.w.clone();
    let sup_star = branch.w_star()?.sup_w;
    let cap_star = capacitance(&d, &w_star)?;
    let star_bracket = (1.0 + chi * cap_star).powi(2);

    let opts = EvolveOptions::new(5e-4, 4.0).with_stride(10);
    let mut g = Gate::new();
    // Hypothesis checks compare monotone-iteration limits, which preserve
    // discrete ordering up to their stopping tolerance.
    let hyp = 1e-9;
    let run_case = |label: &str,
                        lambda: f64,
                        u0: &DiscreteField,
                        lower: &DiscreteField,
                        upper: &DiscreteField,
                        g: &mut Gate|
     -> Result<()> {
        let u0_low = u0.values.iter().zip(&lower.values).fold(0.0_f64, |m, (u, l)| m.max(l - u));
        let u0_high = u0.values.iter().zip(&upper.values).fold(0.0_f64, |m, (u, h)| m.max(u - h));
        g.require(u0_low <= hyp && u0_high <= hyp, || {
            format!("{label}: initial data escapes its barriers by {:.2e}", u0_low.max(u0_high))
        });
        let res = evolve(&d, chi, lambda, u0, &opts)?;
        let tol = res.tolerance();
        let gap = sandwich_gap(&res, lower, upper);
        g.require(gap <= tol, || {
            format!("{label}: flow escapes the sandwich by {gap:.2e} (tol {tol:.2e})")
        });
        g.note(format!("{label} margin {gap:.1e}"));
        Ok(())
    };

    // Start on a steady profile of the heavier local equation: the flow
    // decays and stays below it. Requires lambda / (1 + chi |Omega|)^2
    // at most the profile's own voltage.
    let mu0 = 0.8 * fold;
    let lambda_a = 0.6 * fold * vol_bracket;
    g.require(lambda_a / vol_bracket <= mu0 + hyp, || {
        format!("upper-barrier case: lambda {lambda_a:.4} too large for the mu0 profile")
    });
    let w_mu0 = minimal_solution(&d, mu0)?;
    run_case("upper-barrier", lambda_a, &w_mu0, &d.zero_field(), &w_mu0, &mut g)?;

    // Start on the fold profile: for lambda in a band just above the fold
    // the flow stays pinched between a fixed shrinkage of the profile and
    // the profile itself.
    let eps1 = (1.0 - sup_star).powi(2) / star_bracket;
    g.require(2.0 * eps1 <= 1.0 + hyp, || {
        format!("pinch case: shrinkage factor {eps1:.4} too large for the ordering hypothesis")
    });
    let shrunk_star = scaled(&d, &w_star, eps1)?;
    let cap_shrunk = capacitance(&d, &shrunk_star)?;
    let hi_b = fold * (1.0 + chi * cap_shrunk).powi(2);
    g.require(fold < hi_b, || "pinch case: empty voltage window".into());
    let lambda_b = 0.5 * (fold + hi_b);
    run_case("pinch", lambda_b, &w_star, &shrunk_star, &w_star, &mut g)?;

    // Start on a mid-branch profile with a deliberate shrinkage margin
    // delta; the window endpoints come from the shrunken capacitance.
    let delta = 0.25;
    let lambda2 = 0.5 * fold;
    let w_mid = minimal_solution(&d, lambda2)?;
    let shrunk_mid = scaled(&d, &w_mid, 1.0 - 2.0 * delta)?;
    let lo_c = lambda2 * (1.0 - 2.0 * delta) * star_bracket / (1.0 - sup_star).powi(2);
    let cap_mid = capacitance(&d, &shrunk_mid)?;
    let hi_c = fold * (1.0 + chi * cap_mid).powi(2);
    g.require(lo_c < hi_c, || "mid-branch case: empty voltage window".into());
    let lambda_c = 0.5 * (lo_c + hi_c);
    run_case("mid-branch", lambda_c, &w_mid, &shrunk_mid, &w_star, &mut g)?;

    // Both barriers from the branch itself: local profiles at voltages
    // bracketing the nonlocal equivalent voltage of lambda.
    let lambda_d = 0.8 * fold * vol_bracket;
    let mu = lambda_d / vol_bracket;
    let mu_prime = lambda_d / star_bracket;
    g.require(mu_prime <= mu + hyp, || {
        format!("bracketing case: equivalent voltages out of order ({mu_prime:.4} vs {mu:.4})")
    });
    let upper_d = minimal_solution(&d, mu)?;
    let lower_d = minimal_solution(&d, (1.0 - 2.0 * delta) * mu_prime)?;
    let u0_d = minimal_solution(&d, (1.0 - delta) * mu_prime)?;
    run_case("bracketing", lambda_d, &u0_d, &lower_d, &upper_d, &mut g)?;

    Ok(g)
}

/// 9: quench dynamics. Touchdown times fall as the voltage rises, with
/// lambda * T bounded, and on the disk the eigenfunction moment obeys its
/// differential inequality at every sampled instant before touchdown.
fn gate_quench(_dir: &Path) -> Result<Gate> {
    let started = Instant::now();
    let d = interval(128)?;
    let opts = EvolveOptions::new(1e-4, 5.0).with_stride(10);
    let lambdas = [5.0, 10.0, 20.0, 40.0];
    let sweep = mems_core::quench_sweep(&d, 0.4, &lambdas, &d.zero_field(), &opts)?;

    let mut g = Gate::new();
    let quenched = sweep.entries.iter().filter(|e| e.quenched).count();
    g.require(quenched == lambdas.len(), || {
        format!("only {quenched} of {} voltages quenched", lambdas.len())
    });
    let times: Vec<f64> = sweep.entries.iter().filter_map(|e| e.t_quench).collect();
    let strictly_falling = times.windows(2).all(|w| w[1] < w[0]);
    g.require(strictly_falling, || {
        format!("touchdown times {times:?} not strictly decreasing")
    });
    let ratio = sweep.lambda_t_ratio.unwrap_or(f64::INFINITY);
    g.require(ratio <= 3.0, || {
        format!("lambda * T spread {ratio:.3} above 3")
    });

    let db = ball(1.0, 2, 128)?;
    let optsb = EvolveOptions::new(1e-4, 5.0).with_stride(10);
    let resb = evolve(&db, 0.4, 20.0, &db.zero_field(), &optsb)?;
    g.require(
        matches!(resb.status, EvolutionStatus::Quenched { .. }),
        || "disk run at lambda = 20 failed to quench".into(),
    );
    let eig = principal_eigenpair(&db)?;
    let trace = moment_trace(&db, &resb, &eig, 0.4, 20.0)?;
    // Signed defect of E'(t) >= -mu1 E + lambda I(u), normalized like the
    // identity residual so the blow-up of the right side near touchdown
    // does not inflate the scale.
    let tol = 10.0 * (1e-4 + db.h * db.h);
    let min_normalized = trace
        .samples
        .iter()
        .map(|s| (s.slope_numeric - s.rhs_exact) / (1.0 + s.rhs_exact.abs()))
        .fold(f64::INFINITY, f64::min);
    g.require(min_normalized >= -tol, || {
        format!("moment inequality violated by {:.2e} (tol {tol:.2e})", -min_normalized)
    });
    g.budget(started, 60.0);
    g.note(format!(
        "touchdown at t = {times:?}, lambda*T spread {ratio:.3}, moment margin {min_normalized:.1e}"
    ));
    Ok(g)
}

/// 10: continuous dependence on the initial data.
///
/// A 1e-4-sized bump on the initial state moves the trajectory by at most
/// 1e-3 in L^1 over the first unit of time.
fn gate_stability(_dir: &Path) -> Result<Gate> {
    let d = interval(128)?;
    let opts = EvolveOptions::new(1e-3, 1.0).with_stride(1);
    let base = evolve(&d, 1.0, 0.5, &d.zero_field(), &opts)?;
    let bump = d.field_from_fn(|x| 1e-4 * (1.0 - x * x));
    let pert = evolve(&d, 1.0, 0.5, &bump, &opts)?;

    let mut g = Gate::new();
    g.require(base.times == pert.times, || {
        "runs sampled different time grids".into()
    });
    let mut worst = 0.0_f64;
    let n = base.snapshots.len().min(pert.snapshots.len());
    for k in 0..n {
        let l1 = d.integrate_map2(&base.snapshots[k].1, &pert.snapshots[k].1, |a, b| {
            (a - b).abs()
        })?;
        worst = worst.max(l1);
    }
    g.require(worst <= 1e-3, || {
        format!("L1 separation {worst:.2e} above 1e-3")
    });
    g.note(format!("max L1 separation {worst:.1e} over [0, 1]"));
    Ok(g)
}

/// 11: bitwise determinism of the experiment pipeline.
///
/// Every concrete experiment runs twice into separate directories on
/// small grids; the two trees must agree file by file, byte for byte,
/// and no run may report a failing check.
fn gate_determinism(dir: &Path) -> Result<Gate> {
    let runs: Vec<(&str, ExperimentConfig)> = vec![
        ("steady-branch", small_config(48, |_| {})),
        ("nonlocal-steady", small_config(48, |_| {})),
        ("thresholds", small_config(48, |c| {
            c.domain.kind = Shape::Ball;
            c.domain.dim = Some(2);
            c.params.chi = 0.1;
        })),
        ("evolve", small_config(48, |c| {
            c.evolve.t_max = 1.5;
        })),
        ("picard", small_config(48, |c| {
            c.u0 = InitialData::ScaledEigenfunction { c: 0.3 };
        })),
        ("energy", small_config(48, |c| {
            c.evolve.t_max = 1.5;
        })),
        ("quench-sweep", small_config(48, |c| {
            c.params.chi = 0.4;
            c.params.lambdas = Some(vec![8.0, 16.0]);
            c.evolve.dt = 2e-4;
            c.evolve.t_max = 2.0;
            c.evolve.stride = 10;
        })),
    ];

    let root_a = dir.join("a");
    let root_b = dir.join("b");
    let mut g = Gate::new();
    let mut files = 0usize;
    for (name, cfg) in &runs {
        let rec_a = experiments::run(name, cfg, &root_a)?;
        let rec_b = experiments::run(name, cfg, &root_b)?;
        g.require(!rec_a.any_fail() && !rec_b.any_fail(), || {
            format!("{name}: a determinism run reported a failing check")
        });

        let dir_a = root_a.join(name);
        let dir_b = root_b.join(name);
        let list_a = file_names(&dir_a)?;
        let list_b = file_names(&dir_b)?;
        g.require(list_a == list_b, || {
            format!("{name}: the two runs produced different file sets")
        });
        for rel in &list_a {
            files += 1;
            let bytes_a = fs::read(dir_a.join(rel)).map_err(|e| Error::io(dir_a.join(rel), e))?;
            let bytes_b = fs::read(dir_b.join(rel)).map_err(|e| Error::io(dir_b.join(rel), e))?;
            g.require(bytes_a == bytes_b, || {
                format!("{name}/{}: byte mismatch between repeated runs", rel.display())
            });
        }
    }
    g.note(format!("{} experiments, {files} files byte-identical across repeats", runs.len()));
    Ok(g)
}

fn small_config(cells: usize, tweak: impl FnOnce(&mut ExperimentConfig)) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.domain.cells = cells;
    tweak(&mut cfg);
    cfg
}

/// Sorted relative paths of all files under `root`.
fn file_names(root: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        if path.is_file() {
            out.push(PathBuf::from(entry.file_name()));
        }
    }
    out.sort();
    Ok(out)
}
