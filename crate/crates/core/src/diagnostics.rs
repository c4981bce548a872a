//! Post-processing checks: energy balance, interval decay bounds,
//! eigenfunction-moment dynamics, and quenching-time sweeps.
//!
//! Everything here consumes stored evolution histories; no stepping
//! happens except inside [`quench_sweep`], which fans evolutions out per
//! forcing level. The common theme is that each check has an exact
//! continuum identity behind it, so deviations measure the discretization
//! honestly instead of being tuning knobs:
//!
//! * the Lyapunov functional
//!   `int u_t^2 (cumulative) + 1/2 int |grad u|^2 + lambda/(chi (1 + chi int dy/(1-u)))`
//!   is constant along smooth flows;
//! * below the one-dimensional threshold `chi (1 + chi |Omega|)/(2 |Omega|)`
//!   the gradient energy and the sup stay under explicit bounds;
//! * the moment E(t) = int u phi1 obeys
//!   `E' = -mu1 E + lambda (int phi1/(1-u)^2) / (1 + chi int 1/(1-u))^2`
//!   exactly (the boundary terms of Green's identity vanish);
//! * touchdown times decay like 1/lambda, with lambda T_lambda bounded.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{DiscreteField, Domain, DomainKind};
use crate::parabolic::{evolve, EvolutionResult, EvolutionStatus, EvolveOptions};
use crate::spectral::EigenPair;

/// Densest sample spacing the centered-difference post-processing accepts.
const MAX_SAMPLE_GAP: f64 = 1.05e-2;

/// One row of the energy ledger.
#[derive(Debug, Clone)]
pub struct EnergySample {
    pub t: f64,
    /// int_{t0}^t int_Omega u_t^2, trapezoid-accumulated.
    pub dissipation_cum: f64,
    /// 1/2 int_Omega |grad u|^2.
    pub dirichlet: f64,
    /// lambda / (chi (1 + chi int_Omega dy/(1-u))); zero when lambda = 0.
    pub nonlocal_pot: f64,
    /// dissipation_cum + dirichlet + nonlocal_pot, constant on smooth runs.
    pub lyapunov: f64,
}

/// Energy history of one run, starting at t0.
#[derive(Debug, Clone)]
pub struct EnergyLedger {
    pub samples: Vec<EnergySample>,
    pub t0: f64,
}

impl EnergyLedger {
    /// Largest relative drift of the Lyapunov value from its start.
    pub fn max_lyapunov_drift(&self) -> f64 {
        let base = self.samples[0].lyapunov;
        let scale = base.abs().max(1e-300);
        self.samples
            .iter()
            .map(|s| (s.lyapunov - base).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// Nodal time derivatives of the stored snapshots: centered differences
/// inside, one-sided at the run's ends. Returns one interior-node vector
/// per snapshot index in `lo..hi`.
fn snapshot_rates(
    d: &Domain,
    snaps: &[(f64, DiscreteField)],
    lo: usize,
    hi: usize,
) -> Vec<Vec<f64>> {
    let n = snaps.len();
    (lo..hi)
        .map(|k| {
            let (prev, next) = match k {
                0 => (0, 1),
                k if k == n - 1 => (n - 2, n - 1),
                k => (k - 1, k + 1),
            };
            let dt = snaps[next].0 - snaps[prev].0;
            let a = d.pack_interior(&snaps[prev].1);
            let b = d.pack_interior(&snaps[next].1);
            a.iter().zip(&b).map(|(x, y)| (y - x) / dt).collect()
        })
        .collect()
}

fn dense_window(res: &EvolutionResult, t0: f64) -> Result<(usize, usize)> {
    let snaps = &res.snapshots;
    let lo = snaps.partition_point(|(t, _)| *t < t0 - 1e-12);
    let hi = snaps.len();
    if hi - lo < 3 {
        return Err(Error::InsufficientSamples(format!(
            "only {} samples past t0 = {t0}",
            hi - lo
        )));
    }
    for pair in snaps[lo..hi].windows(2) {
        let gap = pair[1].0 - pair[0].0;
        if gap > MAX_SAMPLE_GAP {
            return Err(Error::InsufficientSamples(format!(
                "sample gap {gap} too wide for time differencing"
            )));
        }
    }
    Ok((lo, hi))
}

/// Builds the energy ledger of a stored run from time t0 on.
///
/// lambda = 0 runs are pure heat flow and get a zero potential; otherwise
/// the potential needs chi > 0 to be defined.
pub fn energy_ledger(d: &Domain, res: &EvolutionResult, t0: f64) -> Result<EnergyLedger> {
    let lambda = res.params.lambda;
    let chi = res.params.chi;
    if d.id() != res.params.domain_id {
        return Err(Error::DomainMismatch);
    }
    if lambda > 0.0 && chi <= 0.0 {
        return Err(Error::InvalidParams(
            "the nonlocal potential needs chi > 0 when lambda > 0".into(),
        ));
    }
    let (lo, hi) = dense_window(res, t0)?;
    let rates = snapshot_rates(d, &res.snapshots, lo, hi);

    let mut samples = Vec::with_capacity(hi - lo);
    let mut dissipation_cum = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (k, rate) in rates.iter().enumerate() {
        let (t, u) = &res.snapshots[lo + k];
        let rate_field = d.unpack_interior(rate);
        let rate_sq = d.integrate_map(&rate_field, |v| v * v)?;
        if let Some((tp, rp)) = prev {
            dissipation_cum += 0.5 * (t - tp) * (rp + rate_sq);
        }
        prev = Some((*t, rate_sq));

        let dirichlet = d.dirichlet_energy(u)?;
        let nonlocal_pot = if lambda == 0.0 {
            0.0
        } else {
            let capacitance = d.integrate_map(u, |v| 1.0 / (1.0 - v))?;
            lambda / (chi * (1.0 + chi * capacitance))
        };
        samples.push(EnergySample {
            t: *t,
            dissipation_cum,
            dirichlet,
            nonlocal_pot,
            lyapunov: dissipation_cum + dirichlet + nonlocal_pot,
        });
    }
    Ok(EnergyLedger { samples, t0 })
}

/// Bound checks available on intervals below the global-existence
/// threshold, for runs started from rest.
#[derive(Debug, Clone)]
pub struct IntervalBoundsReport {
    /// 2 lambda / (chi (1 + chi |Omega|)), bounding int u_x^2.
    pub gradient_bound: f64,
    pub gradient_max: f64,
    /// sqrt(2 lambda |Omega| / (chi (1 + chi |Omega|))), bounding sup u.
    pub sup_bound: f64,
    pub sup_max: f64,
    /// Both bounds held at every sample, up to the run's tolerance.
    pub all_hold: bool,
}

/// Verifies the interval decay bounds on a run from rest.
pub fn interval_bounds_check(
    d: &Domain,
    res: &EvolutionResult,
    chi: f64,
    lambda: f64,
) -> Result<IntervalBoundsReport> {
    if d.spec.kind != DomainKind::Interval {
        return Err(Error::UnsupportedDomain(
            "the decay bounds are one-dimensional".into(),
        ));
    }
    if d.id() != res.params.domain_id {
        return Err(Error::DomainMismatch);
    }
    if chi <= 0.0 {
        return Err(Error::HypothesisViolated("chi must be positive".into()));
    }
    let vol = d.volume;
    let threshold = chi * (1.0 + chi * vol) / (2.0 * vol);
    if lambda >= threshold {
        return Err(Error::HypothesisViolated(format!(
            "lambda = {lambda} is not below the threshold {threshold}"
        )));
    }
    if !res.params.u0_descriptor.starts_with("zero") {
        return Err(Error::HypothesisViolated(format!(
            "the bounds assume a start from rest, run began from {}",
            res.params.u0_descriptor
        )));
    }

    let denom = chi * (1.0 + chi * vol);
    let gradient_bound = 2.0 * lambda / denom;
    let sup_bound = (2.0 * lambda * vol / denom).sqrt();
    let tol = res.tolerance();

    let mut gradient_max = 0.0_f64;
    let mut sup_max = 0.0_f64;
    for (_, u) in &res.snapshots {
        gradient_max = gradient_max.max(2.0 * d.dirichlet_energy(u)?);
        sup_max = sup_max.max(u.sup());
    }
    Ok(IntervalBoundsReport {
        gradient_bound,
        gradient_max,
        sup_bound,
        sup_max,
        all_hold: gradient_max <= gradient_bound + tol && sup_max <= sup_bound + tol,
    })
}

/// One row of the moment trace.
#[derive(Debug, Clone)]
pub struct MomentSample {
    pub t: f64,
    /// E(t) = int_Omega u phi1.
    pub moment: f64,
    /// Three-point slope of the moment, second order on uneven spacing.
    pub slope_numeric: f64,
    /// -mu1 E + lambda (int phi1/(1-u)^2) / (1 + chi int 1/(1-u))^2.
    pub rhs_exact: f64,
}

/// Moment dynamics of one run against the principal eigenpair.
#[derive(Debug, Clone)]
pub struct MomentTrace {
    pub samples: Vec<MomentSample>,
}

impl MomentTrace {
    /// Largest normalized defect of the moment identity.
    pub fn max_identity_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.slope_numeric - s.rhs_exact).abs() / (1.0 + s.rhs_exact.abs()))
            .fold(0.0, f64::max)
    }

    /// Most negative signed defect slope_numeric - rhs_exact; the
    /// continuum slope is never below the exact right side.
    pub fn min_signed_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.slope_numeric - s.rhs_exact)
            .fold(f64::INFINITY, f64::min)
    }
}

/// The exact moment slope at one state.
pub fn moment_rhs(
    d: &Domain,
    eig: &EigenPair,
    chi: f64,
    lambda: f64,
    u: &DiscreteField,
) -> Result<f64> {
    let moment = d.integrate_map2(&eig.phi1, u, |p, v| p * v)?;
    let forced = d.integrate_map2(&eig.phi1, u, |p, v| p / ((1.0 - v) * (1.0 - v)))?;
    let capacitance = d.integrate_map(u, |v| 1.0 / (1.0 - v))?;
    let bracket = 1.0 + chi * capacitance;
    Ok(-eig.mu1 * moment + lambda * forced / (bracket * bracket))
}

/// Builds the moment trace of a run; samples at the run's interior
/// snapshot times only, where centered differences exist.
pub fn moment_trace(
    d: &Domain,
    res: &EvolutionResult,
    eig: &EigenPair,
    chi: f64,
    lambda: f64,
) -> Result<MomentTrace> {
    if d.id() != res.params.domain_id {
        return Err(Error::DomainMismatch);
    }
    let (lo, hi) = dense_window(res, 0.0)?;
    debug_assert_eq!(lo, 0);

    let moments: Vec<f64> = res.snapshots[lo..hi]
        .iter()
        .map(|(_, u)| d.integrate_map2(&eig.phi1, u, |p, v| p * v))
        .collect::<Result<_>>()?;

    let mut samples = Vec::with_capacity(hi - lo - 2);
    for k in (lo + 1)..(hi - 1) {
        let (t, u) = &res.snapshots[k];
        // Quadratic-exact three-point slope. Snapshot spacing turns uneven
        // when the stepper halves dt near touchdown, and the plain centered
        // formula is then only first-order accurate, badly lagging the
        // blow-up of E'. This one stays second order, and its error term
        // h_l h_r E'''/6 has the sign of E''', so on the convex approach to
        // touchdown it never under-reports the slope.
        let h_l = t - res.snapshots[k - 1].0;
        let h_r = res.snapshots[k + 1].0 - t;
        let slope_numeric = (h_l * h_l * moments[k + 1] - h_r * h_r * moments[k - 1]
            + (h_r * h_r - h_l * h_l) * moments[k])
            / (h_l * h_r * (h_l + h_r));
        samples.push(MomentSample {
            t: *t,
            moment: moments[k],
            slope_numeric,
            rhs_exact: moment_rhs(d, eig, chi, lambda, u)?,
        });
    }
    Ok(MomentTrace { samples })
}

/// Verdict for one forcing level of a sweep.
#[derive(Debug, Clone)]
pub struct QuenchEntry {
    pub lambda: f64,
    pub quenched: bool,
    /// Extrapolated touchdown time, when quenched.
    pub t_quench: Option<f64>,
    pub final_sup: f64,
}

/// Least-squares fit of 1/T = (lambda - lambda0)/c3 over quenched entries.
#[derive(Debug, Clone)]
pub struct QuenchFit {
    pub c3: f64,
    pub lambda0: f64,
    /// Largest relative misfit of the fitted T against the measured one.
    pub max_rel_misfit: f64,
}

/// Result of a forcing sweep.
#[derive(Debug, Clone)]
pub struct QuenchSweep {
    pub entries: Vec<QuenchEntry>,
    /// T nonincreasing across quenched entries.
    pub monotone: bool,
    /// max / min of lambda * T over quenched entries.
    pub lambda_t_ratio: Option<f64>,
    pub fit: Option<QuenchFit>,
}

/// Evolves every lambda in the list (in parallel) and summarizes the
/// touchdown behavior.
pub fn quench_sweep(
    d: &Domain,
    chi: f64,
    lambdas: &[f64],
    u0: &DiscreteField,
    opts: &EvolveOptions,
) -> Result<QuenchSweep> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParams("empty lambda list".into()));
    }
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(
            "lambdas must be strictly increasing".into(),
        ));
    }

    let runs: Vec<EvolutionResult> = lambdas
        .par_iter()
        .map(|&lambda| evolve(d, chi, lambda, u0, opts))
        .collect::<Result<_>>()?;

    let entries: Vec<QuenchEntry> = lambdas
        .iter()
        .zip(&runs)
        .map(|(&lambda, run)| {
            let (quenched, t_quench) = match run.status {
                EvolutionStatus::Quenched { t_quench, .. } => (true, Some(t_quench)),
                _ => (false, None),
            };
            QuenchEntry {
                lambda,
                quenched,
                t_quench,
                final_sup: *run.sup_u.last().expect("runs sample t=0"),
            }
        })
        .collect();

    let quenched: Vec<(f64, f64)> = entries
        .iter()
        .filter_map(|e| e.t_quench.map(|t| (e.lambda, t)))
        .collect();

    let monotone = quenched.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9));
    let lambda_t_ratio = if quenched.len() >= 2 {
        let products: Vec<f64> = quenched.iter().map(|(l, t)| l * t).collect();
        let max = products.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = products.iter().cloned().fold(f64::INFINITY, f64::min);
        Some(max / min)
    } else {
        None
    };

    let fit = if quenched.len() >= 2 {
        // 1/T is linear in lambda under the T <= c3/(lambda - lambda0)
        // saturation; regress and read both constants off the line.
        let n = quenched.len() as f64;
        let (mut sl, mut sy, mut sll, mut sly) = (0.0, 0.0, 0.0, 0.0);
        for &(l, t) in &quenched {
            let y = 1.0 / t;
            sl += l;
            sy += y;
            sll += l * l;
            sly += l * y;
        }
        let det = n * sll - sl * sl;
        let slope = (n * sly - sl * sy) / det;
        let intercept = (sy - slope * sl) / n;
        if slope > 0.0 {
            let c3 = 1.0 / slope;
            let lambda0 = -intercept * c3;
            let max_rel_misfit = quenched
                .iter()
                .map(|&(l, t)| {
                    let predicted = c3 / (l - lambda0);
                    (predicted - t).abs() / t
                })
                .fold(0.0, f64::max);
            Some(QuenchFit {
                c3,
                lambda0,
                max_rel_misfit,
            })
        } else {
            None
        }
    } else {
        None
    };

    Ok(QuenchSweep {
        entries,
        monotone,
        lambda_t_ratio,
        fit,
    })
}
