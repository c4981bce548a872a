//! Numerical laboratory for a parabolic nonlocal MEMS equation.
//!
//! The object of study is the membrane deflection u(x, t) driven by a
//! capacitively coupled voltage,
//!
//! ```text
//! u_t = Laplacian u + lambda / [ (1 - u)^2 (1 + chi int_Omega dy/(1 - u))^2 ],
//! u = 0 on the boundary,   0 <= u < 1,
//! ```
//!
//! on an interval or a radially symmetric ball. The denominator couples
//! every point to the whole membrane through the capacitance integral, and
//! the interesting regimes are organized by the forcing strength lambda:
//! small lambda relaxes to a steady deflection, large lambda drives the
//! membrane to touch the top plate (u -> 1, "quenching") in finite time.
//!
//! The crate is organized bottom-up:
//!
//! * [`tridiag`]: factor-once tridiagonal solves, the only linear algebra
//!   the one-dimensional reductions need.
//! * [`geometry`]: grids, exact-for-affine quadrature, and the Dirichlet
//!   Laplacian on the two supported shapes.
//! * [`spectral`]: the principal Dirichlet eigenpair by inverse power
//!   iteration, and the linearized stability eigenvalue along branches.
//! * [`steady_local`]: the local equation -Laplacian w = lambda/(1-w)^2,
//!   its minimal branch, and the pull-in voltage lambda* at the fold.
//! * [`steady_nonlocal`]: the scalar reduction of the nonlocal steady
//!   problem, plus the explicit existence and nonexistence thresholds.
//! * [`parabolic`]: the IMEX evolution with quench detection, adaptive
//!   step halving, and ordered-comparison checks.
//! * [`duhamel`]: the heat semigroup and Picard iteration for the
//!   integral form of the equation on its guaranteed existence horizon.
//! * [`diagnostics`]: energy ledgers, interval a priori bounds, the
//!   eigenfunction moment identity, and quench-time sweeps.
//!
//! Everything fallible returns [`Error`] through the crate-wide [`Result`];
//! solvers never panic on bad input.

pub mod diagnostics;
pub mod duhamel;
pub mod error;
pub mod geometry;
pub mod parabolic;
pub mod spectral;
pub mod steady_local;
pub mod steady_nonlocal;
pub mod tridiag;

pub use diagnostics::{
    energy_ledger, interval_bounds_check, moment_rhs, moment_trace, quench_sweep, EnergyLedger,
    EnergySample, IntervalBoundsReport, MomentSample, MomentTrace, QuenchEntry, QuenchFit,
    QuenchSweep,
};
pub use duhamel::{heat_propagate, picard_existence_horizon, picard_iterate, PicardRun};
pub use error::{Error, Result};
pub use geometry::{DiscreteField, Domain, DomainKind, DomainSpec};
pub use parabolic::{
    assert_comparison, evolve, steady_limit_check, ComparisonReport, EvolutionResult,
    EvolutionStatus, EvolveOptions, EvolveParams,
};
pub use spectral::{linearized_eigenvalue, principal_eigenpair, EigenPair};
pub use steady_local::{minimal_solution, pull_in_voltage, BranchPoint, SteadyBranch};
pub use steady_nonlocal::{
    capacitance, convex_upper_bound, h_map, interval_threshold, nonexistence_onset,
    solve_nonlocal_steady, solve_nonlocal_steady_with_branch, thresholds, thresholds_with_branch,
    NonlocalSolution, ThresholdReport,
};
pub use tridiag::{Tridiagonal, TridiagonalFactor};
