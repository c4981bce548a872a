//! Error type shared by every solver in the crate.
//!
//! Solvers distinguish "you asked for something outside the model" (bad
//! specs, parameters, or fields) from "the computation told us something"
//! (no steady state below touchdown, root outside the resolvable range,
//! iteration stalls). Callers often branch on the second kind: a
//! `NoSteadyState` during continuation is the signal that the fold has been
//! passed, not a failure.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Domain construction rejected the spec (bad extent, dimension, or resolution).
    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),

    /// A field was passed to a domain it is not bound to.
    #[error("field is bound to a different domain")]
    DomainMismatch,

    /// A tridiagonal solve hit a zero pivot.
    #[error("linear system is singular")]
    SingularSystem,

    /// Eigenvalue iteration did not reach its stopping tolerance.
    #[error("eigenvalue iteration did not converge within {0} iterations")]
    NoConvergence(usize),

    /// A profile left the admissible range (for instance w >= 1 somewhere).
    #[error("field value out of range: {0}")]
    FieldOutOfRange(String),

    /// Monotone iteration diverged toward touchdown or stalled at the cap;
    /// both mean there is no minimal steady state at this forcing level.
    #[error("no steady state at lambda = {lambda}: {reason}")]
    NoSteadyState { lambda: f64, reason: String },

    /// The nonlocal reduction has no root below the fold at this lambda.
    #[error("lambda = {lambda} is beyond the resolvable range (h_max = {h_max})")]
    RootOutOfRange { lambda: f64, h_max: f64 },

    /// A branch operation needs at least one stored point.
    #[error("steady branch holds no points")]
    EmptyBranch,

    /// Initial data outside [0, 1) or not bound to the domain.
    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    /// The evolving profile picked up a NaN or infinity.
    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    /// Scalar parameters outside their documented ranges.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A Picard iterate crossed the (1 + a)/2 ceiling that the contraction
    /// argument guarantees; this indicates an implementation bug, not physics.
    #[error("Picard iterate crossed its ceiling: {0}")]
    CeilingViolation(String),

    /// Two evolution results cannot be compared sample by sample.
    #[error("runs are not comparable: {0}")]
    IncompatibleRuns(String),

    /// An operation that needs a converged run got a quenched or truncated one.
    #[error("run did not converge to a steady state")]
    NotConverged,

    /// A diagnostic needs denser sampling than the run provides.
    #[error("not enough samples: {0}")]
    InsufficientSamples(String),

    /// A check was invoked outside the hypotheses that make it meaningful.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// The requested quantity is only defined for other domain shapes.
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
}
