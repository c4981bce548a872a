//! The named experiments behind the `mems` binary.
//!
//! Each experiment builds its inputs from an [`ExperimentConfig`], drives
//! the matching mems-core pipeline, and leaves its outputs in a directory
//! of its own: `record.json` with scalars and verdicts, CSV data wide
//! enough to replot from scratch, and SVG plots. Solver errors become fail
//! verdicts so a run over hostile parameters still produces a record;
//! only configuration and I/O problems abort.

use std::fs;
use std::path::Path;

use mems_core::{
    energy_ledger, evolve, h_map, interval_bounds_check, nonexistence_onset, picard_iterate,
    principal_eigenpair, pull_in_voltage, quench_sweep, solve_nonlocal_steady, thresholds,
    DiscreteField, Domain, EvolutionResult, EvolutionStatus,
};

use crate::acceptance;
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::plots::Plot;
use crate::record::{write_csv, ResultRecord, Series, Verdict};

/// Experiment names and one-line summaries, in `--list` order.
pub const EXPERIMENTS: &[(&str, &str)] = &[
    (
        "steady-branch",
        "continue the local minimal branch to the pull-in fold",
    ),
    (
        "nonlocal-steady",
        "solve the scalar reduction of the nonlocal steady problem",
    ),
    (
        "thresholds",
        "existence and nonexistence voltage thresholds for one (domain, chi)",
    ),
    (
        "evolve",
        "time-step the nonlocal equation with quench detection",
    ),
    (
        "picard",
        "iterate the integral form on its guaranteed existence window",
    ),
    (
        "energy",
        "Lyapunov ledger and a priori bounds of one evolution",
    ),
    (
        "quench-sweep",
        "touchdown times across a list of voltages, with a 1/(lambda - lambda0) fit",
    ),
    (
        "verify-all",
        "run the full acceptance suite, one verdict per criterion",
    ),
];

/// Exact column set of every `series.csv`.
pub const SERIES_COLUMNS: [&str; 6] = [
    "t",
    "sup_u",
    "E",
    "dirichlet",
    "dissipation_cum",
    "nonlocal_pot",
];

/// Runs one experiment, writing everything under `out_root/<name>/`.
///
/// The returned record is also persisted as `record.json`. Errors out of
/// mems-core turn into a fail verdict on a `solver` check; errors in the
/// configuration or the filesystem propagate.
pub fn run(name: &str, cfg: &ExperimentConfig, out_root: &Path) -> Result<ResultRecord> {
    let cfg = cfg.clone().for_experiment(name)?;
    cfg.validate()?;
    let dir = out_root.join(name);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let body = match name {
        "steady-branch" => steady_branch(&cfg, &dir),
        "nonlocal-steady" => nonlocal_steady(&cfg, &dir),
        "thresholds" => thresholds_exp(&cfg, &dir),
        "evolve" => evolve_exp(&cfg, &dir),
        "picard" => picard_exp(&cfg, &dir),
        "energy" => energy_exp(&cfg, &dir),
        "quench-sweep" => quench_sweep_exp(&cfg, &dir),
        "verify-all" => verify_all(&cfg, &dir),
        other => {
            return Err(Error::Config(format!(
                "unknown experiment {other:?}; `mems --list` names the valid ones"
            )))
        }
    };

    let rec = match body {
        Ok(rec) => rec,
        Err(Error::Core(e)) => {
            let mut rec = ResultRecord::new(name, cfg);
            rec.check("solver", Verdict::fail(e.to_string()));
            rec
        }
        Err(other) => return Err(other),
    };
    rec.write(&dir.join("record.json"))?;
    Ok(rec)
}

fn plot_verdict(wrote: bool) -> Verdict {
    if wrote {
        Verdict::Pass
    } else {
        Verdict::skipped("series is empty, no plot written")
    }
}

/// The six series columns for a sampled trajectory of profiles. The
/// dissipation column comes from the caller (None prints as NaN): it is a
/// property of the whole history, not of single profiles.
fn field_series_rows(
    d: &Domain,
    chi: f64,
    lambda: f64,
    samples: &[(f64, &DiscreteField)],
    dissipation: Option<&[f64]>,
) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::with_capacity(samples.len());
    for (i, (t, u)) in samples.iter().enumerate() {
        let dirichlet = d.dirichlet_energy(u)?;
        let nonlocal_pot = if lambda == 0.0 {
            0.0
        } else if chi <= 0.0 {
            // the potential lambda / (chi (1 + chi C)) is undefined at chi = 0
            f64::NAN
        } else {
            let cap = d.integrate_map(u, |v| 1.0 / (1.0 - v))?;
            lambda / (chi * (1.0 + chi * cap))
        };
        let energy = dirichlet + nonlocal_pot;
        let diss = dissipation.map_or(f64::NAN, |v| v[i]);
        rows.push(vec![*t, u.sup(), energy, dirichlet, diss, nonlocal_pot]);
    }
    Ok(rows)
}

/// Series rows for a stored evolution; dissipation is filled in when the
/// sampling is dense enough for time differencing and the potential is
/// defined, and left NaN otherwise.
fn evolution_series(d: &Domain, res: &EvolutionResult) -> Result<Vec<Vec<f64>>> {
    let dissipation: Option<Vec<f64>> = energy_ledger(d, res, 0.0)
        .ok()
        .map(|ledger| ledger.samples.iter().map(|s| s.dissipation_cum).collect());
    let samples: Vec<(f64, &DiscreteField)> =
        res.snapshots.iter().map(|(t, u)| (*t, u)).collect();
    field_series_rows(
        d,
        res.params.chi,
        res.params.lambda,
        &samples,
        dissipation.as_deref(),
    )
}

fn status_scalars(rec: &mut ResultRecord, res: &EvolutionResult) {
    rec.scalar(
        "t_end",
        *res.times.last().expect("runs sample t = 0"),
        "last sampled time",
    );
    rec.scalar(
        "final_sup",
        *res.sup_u.last().expect("runs sample t = 0"),
        "sup of the final profile",
    );
    rec.scalar(
        "tolerance",
        res.tolerance(),
        "comparison tolerance 10 (dt + h^2) of this run",
    );
    match &res.status {
        EvolutionStatus::ConvergedToSteady(t) => {
            rec.scalar("t_steady", *t, "time the state was declared steady");
        }
        EvolutionStatus::Quenched { t_quench, bracket } => {
            rec.scalar("t_quench", *t_quench, "extrapolated touchdown time");
            rec.scalar(
                "t_quench_bracket_lo",
                bracket.0,
                "last sampled time fully outside the touchdown guard",
            );
            rec.scalar(
                "t_quench_bracket_hi",
                bracket.1,
                "first time inside the touchdown guard",
            );
        }
        EvolutionStatus::HorizonReached => {}
    }
}

fn steady_branch(cfg: &ExperimentConfig, dir: &Path) -> Result<ResultRecord> {
    let d = cfg.domain()?;
    let branch = pull_in_voltage(&d)?;
    let eig = principal_eigenpair(&d)?;
    let fold = branch.w_star()?;
    let ceiling = 4.0 * eig.mu1 / 27.0;

    let mut rec = ResultRecord::new("steady-branch", cfg.clone());
    rec.scalar("lambda_star", branch.lambda_star, "pull-in voltage at the fold");
    rec.scalar(
        "sup_w_star",
        fold.sup_w,
        "deflection sup at the last resolved branch point",
    );
    rec.scalar(
        "mu1",
        eig.mu1,
        "principal eigenvalue of the Dirichlet Laplacian",
    );
    rec.scalar(
        "eigenvalue_ceiling",
        ceiling,
        "4 mu1 / 27, a rigorous upper bound on the pull-in voltage",
    );

    rec.check(
        "fold-below-eigenvalue-ceiling",
        Verdict::check(
            branch.lambda_star <= ceiling * (1.0 + 1e-9),
            format!("lambda* = {} exceeds 4 mu1/27 = {ceiling}", branch.lambda_star),
        ),
    );
    let increasing = branch
        .points
        .windows(2)
        .all(|w| w[1].sup_w > w[0].sup_w && w[1].lambda > w[0].lambda);
    rec.check(
        "branch-strictly-increasing",
        Verdict::check(increasing, "deflection or voltage failed to increase"),
    );
    let stable = branch.points.iter().all(|p| p.lin_eig > 0.0);
    rec.check(
        "minimal-branch-stable",
        Verdict::check(stable, "a branch point has a nonpositive linearized eigenvalue"),
    );

    let rows: Vec<Vec<f64>> = branch
        .points
        .iter()
        .map(|p| vec![p.lambda, p.sup_w, p.lin_eig])
        .collect();
    write_csv(&dir.join("branch.csv"), &["lambda", "sup_w", "lin_eig"], &rows)?;
    rec.series = Some(Series::from_rows(&["lambda", "sup_w", "lin_eig"], &rows));

    let curve: Vec<(f64, f64)> = branch.points.iter().map(|p| (p.lambda, p.sup_w)).collect();
    let wrote = Plot::new("minimal branch", "lambda", "sup w")
        .line(&curve)
        .marker(branch.lambda_star, fold.sup_w, "fold")
        .write(&dir.join("bifurcation.svg"))?;
    rec.check("plot-bifurcation", plot_verdict(wrote));
    Ok(rec)
}

fn nonlocal_steady(cfg: &ExperimentConfig, dir: &Path) -> Result<ResultRecord> {
    let _ = dir;
    let d = cfg.domain()?;
    let (chi, lambda) = (cfg.params.chi, cfg.params.lambda);
    let sol = solve_nonlocal_steady(&d, chi, lambda)?;
    let residual = (h_map(&d, chi, sol.mu_root)? - lambda).abs();

    let mut rec = ResultRecord::new("nonlocal-steady", cfg.clone());
    rec.scalar(
        "mu_root",
        sol.mu_root,
        "local forcing level whose profile solves the nonlocal problem",
    );
    rec.scalar(
        "capacitance_integral",
        sol.capacitance_integral,
        "integral of 1/(1 - v) over the domain",
    );
    rec.scalar("sup_v", sol.v.sup(), "sup of the steady deflection");
    rec.scalar(
        "root_residual",
        residual,
        "absolute defect of h(mu_root) against lambda",
    );

    let tol = 1e-8 * lambda.max(1.0);
    rec.check(
        "root-residual-small",
        Verdict::check(
            residual <= tol,
            format!("|h(mu_root) - lambda| = {residual} exceeds {tol}"),
        ),
    );
    rec.check(
        "deflection-admissible",
        Verdict::check(sol.v.sup() < 1.0, "profile reaches the top plate"),
    );
    Ok(rec)
}

fn thresholds_exp(cfg: &ExperimentConfig, dir: &Path) -> Result<ResultRecord> {
    let _ = dir;
    let d = cfg.domain()?;
    let chi = cfg.params.chi;
    let rep = thresholds(&d, chi)?;
    let onset = nonexistence_onset(&d, chi)?;
    let guaranteed = {
        let vol_factor = 1.0 + chi * d.volume;
        rep.lambda_star_local * vol_factor * vol_factor
    };

    let mut rec = ResultRecord::new("thresholds", cfg.clone());
    rec.scalar(
        "lambda_star_local",
        rep.lambda_star_local,
        "pull-in voltage of the local equation",
    );
    rec.scalar(
        "guaranteed_existence",
        guaranteed,
        "lambda* (1 + chi |Omega|)^2, steady states exist below this",
    );
    rec.scalar(
        "lambda_star_nonlocal",
        rep.lambda_star_nonlocal,
        "lambda* (1 + chi int dx/(1 - w*))^2, the resolved existence bound",
    );
    rec.scalar(
        "nonexistence_onset",
        onset,
        "bisected supremum of voltages with a nonlocal steady state",
    );
    if let Some(ub) = rep.upper_bound_convex {
        rec.scalar(
            "upper_bound_convex",
            ub,
            "explicit nonexistence bound on strictly convex domains",
        );
    }
    if let Some(th) = rep.interval_threshold {
        rec.scalar(
            "interval_threshold",
            th,
            "chi (1 + chi |Omega|) / (2 |Omega|), global existence below this",
        );
    }

    // the bisection resolves the onset to a relative width near 1e-6;
    // orderings are checked with that much slack
    let slack = 1e-6 * onset.max(1.0);
    let band_ok =
        guaranteed <= rep.lambda_star_nonlocal + slack && rep.lambda_star_nonlocal <= onset + slack;
    rec.check(
        "existence-band-ordered",
        Verdict::check(
            band_ok,
            format!(
                "expected {guaranteed} <= {} <= {onset}",
                rep.lambda_star_nonlocal
            ),
        ),
    );
    match rep.upper_bound_convex {
        Some(ub) => rec.check(
            "onset-below-convex-bound",
            Verdict::check(
                onset <= ub + slack,
                format!("onset {onset} exceeds the convex bound {ub}"),
            ),
        ),
        None => rec.check(
            "onset-below-convex-bound",
            Verdict::skipped("the explicit bound needs a ball of dimension >= 2"),
        ),
    }
    Ok(rec)
}

fn evolve_exp(cfg: &ExperimentConfig, dir: &Path) -> Result<ResultRecord> {
    let d = cfg.domain()?;
    let u0 = cfg.initial_field(&d)?;
    let res = evolve(
        &d,
        cfg.params.chi,
        cfg.params.lambda,
        &u0,
        &cfg.evolve_options(),
    )?;
    let rows = evolution_series(&d, &res)?;

    let mut rec = ResultRecord::new("evolve", cfg.clone());
    status_scalars(&mut rec, &res);

    let max_sup = res.sup_u.iter().fold(0.0_f64, |a, &b| a.max(b));
    rec.check(
        "sup-below-touchdown",
        Verdict::check(max_sup < 1.0, format!("sup reached {max_sup}")),
    );
    let from_rest = res.params.u0_descriptor == "zero";
    rec.check(
        "monotone-from-rest",
        if from_rest {
            let mono = res.sup_u.windows(2).all(|w| w[1] >= w[0] - 1e-9);
            Verdict::check(mono, "sup decreased along a run started from rest")
        } else {
            Verdict::skipped("needs a zero start")
        },
    );
    rec.check(
        "rest-under-zero-forcing",
        if cfg.params.lambda == 0.0 && from_rest {
            Verdict::check(
                *res.sup_u.last().expect("runs sample t = 0") == 0.0,
                "the state moved without forcing",
            )
        } else {
            Verdict::skipped("needs lambda = 0 and a zero start")
        },
    );

    write_csv(&dir.join("series.csv"), &SERIES_COLUMNS, &rows)?;
    rec.series = Some(Series::from_rows(&SERIES_COLUMNS, &rows));

    let sup_pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
    let wrote = Plot::new("sup u over time", "t", "sup u")
        .line(&sup_pts)
        .write(&dir.join("sup_u.svg"))?;
    rec.check("plot-sup-u", plot_verdict(wrote));

    let e_pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[2])).collect();
    let wrote = Plot::new("energy over time", "t", "E")
        .line(&e_pts)
        .write(&dir.join("energy.svg"))?;
    rec.check("plot-energy", plot_verdict(wrote));
    Ok(rec)
}

fn picard_exp(cfg: &ExperimentConfig, dir: &Path) -> Result<ResultRecord> {
    const K_MAX: usize = 12;
    let d = cfg.domain()?;
    let u0 = cfg.initial_field(&d)?;
    let (chi, lambda) = (cfg.params.chi, cfg.params.lambda);
    let run = picard_iterate(&d, chi, lambda, &u0, K_MAX)?;

    let mut rec = ResultRecord::new("picard", cfg.clone());
    rec.scalar(
        "horizon_t",
        run.horizon_t,
        "guaranteed existence window (1 - a)^3 / (16 lambda)",
    );
    rec.scalar(
        "ceiling",
        run.a_bound,
        "(1 + a)/2, the sup bound every iterate respects",
    );
    if let Some(k) = run.converged_at {
        rec.scalar("converged_at", k as f64, "first self-consistent iterate");
    }

    let worst = run
        .iterates
        .iter()
        .flatten()
        .map(|f| f.sup())
        .fold(0.0_f64, f64::max);
    rec.scalar("max_iterate_sup", worst, "largest sup over all iterates and times");
    rec.check(
        "iterates-under-ceiling",
        Verdict::check(
            worst <= run.a_bound + 1e-12,
            format!("an iterate reached {worst}, past the ceiling {}", run.a_bound),
        ),
    );
    rec.check(
        "converged-on-horizon",
        Verdict::check(
            run.converged_at.is_some(),
            format!("no fixed point within {K_MAX} iterates"),
        ),
    );

    // With coupling the capacitance bracket only grows, so each iterate
    // sits below its chi = 0 counterpart, nodewise and at every time.
    rec.check(
        "nonlocal-below-local",
        if chi > 0.0 {
            let local = picard_iterate(&d, 0.0, lambda, &u0, K_MAX)?;
            let depth = run.iterates.len().min(local.iterates.len());
            let mut worst_gap = f64::NEG_INFINITY;
            for k in 0..depth {
                for (a, b) in run.iterates[k].iter().zip(&local.iterates[k]) {
                    for (x, y) in a.values.iter().zip(&b.values) {
                        worst_gap = worst_gap.max(x - y);
                    }
                }
            }
            Verdict::check(
                worst_gap <= 1e-12,
                format!("a coupled iterate exceeds the uncoupled one by {worst_gap}"),
            )
        } else {
            Verdict::skipped("chi = 0 is already the uncoupled majorant")
        },
    );

    // series of the last iterate on the horizon grid; dissipation is not
    // defined for an iterate sequence
    let last = run.final_iterate();
    let samples: Vec<(f64, &DiscreteField)> = run
        .times
        .iter()
        .zip(last.iter())
        .map(|(t, u)| (*t, u))
        .collect();
    let rows = field_series_rows(&d, chi, lambda, &samples, None)?;
    write_csv(&dir.join("series.csv"), &SERIES_COLUMNS, &rows)?;
    rec.series = Some(Series::from_rows(&SERIES_COLUMNS, &rows));

    let sup_pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
    let wrote = Plot::new("final iterate over its window", "t", "sup u")
        .line(&sup_pts)
        .write(&dir.join("sup_u.svg"))?;
    rec.check("plot-sup-u", plot_verdict(wrote));
    Ok(rec)
}

fn energy_exp(cfg: &ExperimentConfig, dir: &Path) -> Result<ResultRecord> {
    let d = cfg.domain()?;
    let u0 = cfg.initial_field(&d)?;
    let (chi, lambda) = (cfg.params.chi, cfg.params.lambda);
    let res = evolve(&d, chi, lambda, &u0, &cfg.evolve_options())?;
    let ledger = energy_ledger(&d, &res, 0.0)?;
    let rows = evolution_series(&d, &res)?;

    let mut rec = ResultRecord::new("energy", cfg.clone());
    status_scalars(&mut rec, &res);
    rec.scalar(
        "lyapunov_initial",
        ledger.samples[0].lyapunov,
        "Lyapunov value at the first ledger sample",
    );
    let drift = ledger.max_lyapunov_drift();
    rec.scalar(
        "lyapunov_drift",
        drift,
        "largest relative drift of the Lyapunov value",
    );

    // order of magnitude above what the default step sizes produce; the
    // acceptance suite pins the reference configuration ten times tighter
    rec.check(
        "lyapunov-near-constant",
        Verdict::check(drift <= 1e-3, format!("relative drift {drift}")),
    );
    let diss_monotone = ledger
        .samples
        .windows(2)
        .all(|w| w[1].dissipation_cum >= w[0].dissipation_cum);
    rec.check(
        "dissipation-nondecreasing",
        Verdict::check(diss_monotone, "cumulative dissipation decreased"),
    );

    match interval_bounds_check(&d, &res, chi, lambda) {
        Ok(rep) => {
            rec.scalar(
                "gradient_bound",
                rep.gradient_bound,
                "a priori bound on the gradient energy",
            );
            rec.scalar(
                "gradient_max",
                rep.gradient_max,
                "largest sampled gradient energy",
            );
            rec.scalar("sup_bound", rep.sup_bound, "a priori bound on sup u");
            rec.scalar("sup_max", rep.sup_max, "largest sampled sup u");
            rec.check(
                "a-priori-bounds-hold",
                Verdict::check(rep.all_hold, "a sampled value escaped its bound"),
            );
        }
        Err(e @ (mems_core::Error::UnsupportedDomain(_) | mems_core::Error::HypothesisViolated(_))) => {
            rec.check("a-priori-bounds-hold", Verdict::skipped(e.to_string()));
        }
        Err(e) => return Err(e.into()),
    }

    write_csv(&dir.join("series.csv"), &SERIES_COLUMNS, &rows)?;
    rec.series = Some(Series::from_rows(&SERIES_COLUMNS, &rows));

    let e_pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[2])).collect();
    let lyap_pts: Vec<(f64, f64)> = ledger.samples.iter().map(|s| (s.t, s.lyapunov)).collect();
    let wrote = Plot::new("energy over time", "t", "E (solid), Lyapunov (dashed)")
        .line(&e_pts)
        .dashed(&lyap_pts)
        .write(&dir.join("energy.svg"))?;
    rec.check("plot-energy", plot_verdict(wrote));
    Ok(rec)
}

fn quench_sweep_exp(cfg: &ExperimentConfig, dir: &Path) -> Result<ResultRecord> {
    let lambdas = cfg.params.lambdas.clone().ok_or_else(|| {
        Error::Config("quench-sweep needs params.lambdas, the voltages to sweep".to_string())
    })?;
    let d = cfg.domain()?;
    let u0 = cfg.initial_field(&d)?;
    let sweep = quench_sweep(&d, cfg.params.chi, &lambdas, &u0, &cfg.evolve_options())?;

    let mut rec = ResultRecord::new("quench-sweep", cfg.clone());
    let quenched: Vec<&mems_core::QuenchEntry> =
        sweep.entries.iter().filter(|e| e.quenched).collect();
    rec.scalar(
        "quenched_count",
        quenched.len() as f64,
        "entries that reached the touchdown guard",
    );
    if let Some(r) = sweep.lambda_t_ratio {
        rec.scalar(
            "lambda_t_ratio",
            r,
            "max/min of lambda * T over quenched entries",
        );
    }
    if let Some(fit) = &sweep.fit {
        rec.scalar("fit_c3", fit.c3, "numerator of the fitted T = c3/(lambda - lambda0)");
        rec.scalar("fit_lambda0", fit.lambda0, "pole of the fitted touchdown curve");
        rec.scalar(
            "fit_max_rel_misfit",
            fit.max_rel_misfit,
            "largest relative misfit of the fit",
        );
    }

    rec.check(
        "quench-times-nonincreasing",
        Verdict::check(sweep.monotone, "a larger voltage quenched later"),
    );
    rec.check(
        "lambda-t-ratio-bounded",
        match sweep.lambda_t_ratio {
            Some(r) => Verdict::check(r <= 3.0, format!("lambda T spread {r} exceeds 3")),
            None => Verdict::skipped("needs at least two quenched entries"),
        },
    );
    rec.check(
        "fit-misfit-moderate",
        match &sweep.fit {
            Some(fit) => Verdict::check(
                fit.max_rel_misfit <= 0.5,
                format!("relative misfit {}", fit.max_rel_misfit),
            ),
            None => Verdict::skipped("too few quenched entries to fit"),
        },
    );

    let rows: Vec<Vec<f64>> = sweep
        .entries
        .iter()
        .map(|e| {
            vec![
                e.lambda,
                if e.quenched { 1.0 } else { 0.0 },
                e.t_quench.unwrap_or(f64::NAN),
                e.final_sup,
            ]
        })
        .collect();
    let cols = ["lambda", "quenched", "t_quench", "final_sup"];
    write_csv(&dir.join("sweep.csv"), &cols, &rows)?;
    rec.series = Some(Series::from_rows(&cols, &rows));

    let t_pts: Vec<(f64, f64)> = quenched
        .iter()
        .filter_map(|e| e.t_quench.map(|t| (e.lambda, t)))
        .collect();
    let mut plot = Plot::new("touchdown time against voltage", "lambda", "T").line(&t_pts);
    if let (Some(fit), Some(first), Some(last)) = (&sweep.fit, t_pts.first(), t_pts.last()) {
        let (lo, hi) = (first.0, last.0);
        let overlay: Vec<(f64, f64)> = (0..=100)
            .map(|i| lo + (hi - lo) * i as f64 / 100.0)
            .filter(|l| *l > fit.lambda0)
            .map(|l| (l, fit.c3 / (l - fit.lambda0)))
            .collect();
        plot = plot.dashed(&overlay);
    }
    let wrote = plot.write(&dir.join("tquench.svg"))?;
    rec.check("plot-tquench", plot_verdict(wrote));
    Ok(rec)
}

fn verify_all(cfg: &ExperimentConfig, dir: &Path) -> Result<ResultRecord> {
    let reports = acceptance::run_all(dir)?;
    let mut rec = ResultRecord::new("verify-all", cfg.clone());
    for r in &reports {
        rec.check_with_note(&format!("{:02}-{}", r.index, r.name), r.verdict.clone(), &r.detail);
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::InitialData;

    fn tiny_cfg() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.domain.cells = 48;
        cfg.evolve.t_max = 2.0;
        cfg
    }

    #[test]
    fn evolve_writes_record_series_and_plots() {
        let dir = tempfile::tempdir().unwrap();
        let rec = run("evolve", &tiny_cfg(), dir.path()).unwrap();
        assert!(!rec.any_fail());
        let base = dir.path().join("evolve");
        assert!(base.join("record.json").exists());
        assert!(base.join("sup_u.svg").exists());
        let csv = std::fs::read_to_string(base.join("series.csv")).unwrap();
        assert!(csv.starts_with("t,sup_u,E,dirichlet,dissipation_cum,nonlocal_pot\n"));
        // chi = 1, lambda = 1/2, dense default sampling: every column defined
        assert!(!csv.contains("NaN"));
    }

    #[test]
    fn zero_forcing_run_stays_at_rest() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_cfg();
        cfg.params.lambda = 0.0;
        cfg.evolve.t_max = 0.5;
        let rec = run("evolve", &cfg, dir.path()).unwrap();
        assert!(!rec.any_fail());
        assert_eq!(rec.scalars["final_sup"].value, 0.0);
        let zero_check = rec
            .checks
            .iter()
            .find(|c| c.name == "rest-under-zero-forcing")
            .unwrap();
        assert_eq!(zero_check.verdict, Verdict::Pass);
    }

    #[test]
    fn solver_failures_become_fail_verdicts() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_cfg();
        // far past any steady-state ceiling, so the scalar root search fails
        cfg.params.lambda = 500.0;
        let rec = run("nonlocal-steady", &cfg, dir.path()).unwrap();
        assert!(rec.any_fail());
        assert!(dir.path().join("nonlocal-steady/record.json").exists());
    }

    #[test]
    fn unknown_experiments_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            run("explode", &tiny_cfg(), dir.path()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn quench_sweep_without_lambdas_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            run("quench-sweep", &tiny_cfg(), dir.path()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn steady_branch_emits_the_fold_and_its_plot() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.domain.cells = 48;
        let rec = run("steady-branch", &cfg, dir.path()).unwrap();
        assert!(!rec.any_fail());
        let fold = rec.scalars["lambda_star"].value;
        assert!((fold - 0.35).abs() < 5e-3, "fold at {fold}");
        let svg = std::fs::read_to_string(dir.path().join("steady-branch/bifurcation.svg")).unwrap();
        assert!(svg.contains("fold"));
    }

    #[test]
    fn picard_majorant_ordering_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_cfg();
        cfg.u0 = InitialData::ScaledEigenfunction { c: 0.3 };
        let rec = run("picard", &cfg, dir.path()).unwrap();
        assert!(!rec.any_fail());
        let cmp = rec
            .checks
            .iter()
            .find(|c| c.name == "nonlocal-below-local")
            .unwrap();
        assert_eq!(cmp.verdict, Verdict::Pass);
    }
}
