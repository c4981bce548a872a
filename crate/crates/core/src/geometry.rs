//! Grids, quadrature, and the Dirichlet Laplacian on the two supported shapes.
//!
//! The library works on an interval (-b, b) and on radially symmetric balls
//! of radius R in dimension n, reduced to the radial coordinate. Both become
//! uniform one-dimensional grids:
//!
//! * interval: nodes -b = x_0 < x_1 < ... < x_{M+1} = b with spacing
//!   h = 2b / (M + 1); the M inner nodes are the unknowns,
//! * ball: nodes r_j = j h, h = R / M; the center r = 0 is an ordinary
//!   interior unknown and r_M = R carries the boundary condition.
//!
//! Quadrature integrates the piecewise-linear interpolant exactly against
//! the volume measure (dx on the interval, omega_{n-1} r^{n-1} dr on the
//! ball, with omega_{n-1} the area of the unit sphere). On the interval this
//! is the classical trapezoid rule; on the ball the cell moments are
//! polynomial and evaluated in closed form, so the weights sum to the exact
//! ball volume and affine integrands are integrated exactly at any
//! resolution.
//!
//! The Laplacian is the standard second-order stencil. Radially it reads
//! u_rr + (n-1)/r u_r; the center uses the regularized form n u_rr(0) that
//! follows from u_r(0) = 0, discretized as 2n (u_1 - u_0) / h^2.

use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::tridiag::Tridiagonal;

/// Shape selector for [`DomainSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    /// Symmetric interval (-b, b) in one dimension.
    Interval,
    /// Ball of radius R in dimension `dim`, handled radially.
    Ball,
}

/// Validated description of a computational domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    /// Half-width b for intervals, radius R for balls.
    pub radius: f64,
    /// Space dimension n; intervals are always one-dimensional.
    pub dim: usize,
    /// Number of interior grid nodes.
    pub resolution: usize,
}

impl DomainSpec {
    pub fn interval(half_width: f64, resolution: usize) -> Self {
        Self {
            kind: DomainKind::Interval,
            radius: half_width,
            dim: 1,
            resolution,
        }
    }

    pub fn ball(radius: f64, dim: usize, resolution: usize) -> Self {
        Self {
            kind: DomainKind::Ball,
            radius,
            dim,
            resolution,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.radius.is_finite() || self.radius <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "extent must be positive and finite, got {}",
                self.radius
            )));
        }
        if self.resolution < 16 {
            return Err(Error::InvalidSpec(format!(
                "resolution must be at least 16, got {}",
                self.resolution
            )));
        }
        match self.kind {
            DomainKind::Interval => {
                if self.dim != 1 {
                    return Err(Error::InvalidSpec(format!(
                        "an interval is one-dimensional, got dim = {}",
                        self.dim
                    )));
                }
            }
            DomainKind::Ball => {
                if self.dim < 1 {
                    return Err(Error::InvalidSpec("ball dimension must be >= 1".into()));
                }
                if self.dim > 16 {
                    return Err(Error::InvalidSpec(format!(
                        "ball dimension {} is outside the supported range 1..=16",
                        self.dim
                    )));
                }
            }
        }
        Ok(())
    }

    fn id(&self) -> u64 {
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        self.kind.hash(&mut hasher);
        self.radius.to_bits().hash(&mut hasher);
        self.dim.hash(&mut hasher);
        self.resolution.hash(&mut hasher);
        hasher.finish()
    }
}

/// Grid values bound to the domain they were created on.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    pub values: Vec<f64>,
    /// Identifier of the owning [`Domain`]; checked by every operation.
    pub domain_id: u64,
}

impl DiscreteField {
    /// Largest value over all nodes.
    pub fn sup(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Max-norm over all nodes.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Max-norm of the difference; both fields must share a domain.
    pub fn max_diff(&self, other: &DiscreteField) -> Result<f64> {
        if self.domain_id != other.domain_id || self.values.len() != other.values.len() {
            return Err(Error::DomainMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Uniform grid with quadrature weights and boundary data for one shape.
#[derive(Debug, Clone)]
pub struct Domain {
    pub spec: DomainSpec,
    /// Node coordinates, boundary nodes included.
    pub nodes: Vec<f64>,
    /// Quadrature weight per node; sums exactly to `volume`.
    pub quad_weights: Vec<f64>,
    /// |Omega|: 2b for the interval, omega_{n-1} R^n / n for the ball.
    pub volume: f64,
    /// |dOmega|: 2 for the interval, omega_{n-1} R^{n-1} for the ball.
    pub boundary_measure: f64,
    /// min over the boundary of x . nu; equals b resp. R for these shapes.
    pub convexity_constant: f64,
    /// Grid spacing.
    pub h: f64,
    id: u64,
    /// Volume of each grid cell [x_j, x_{j+1}]; used for gradient energies.
    face_measures: Vec<f64>,
}

/// Surface area of the unit sphere in R^n (2, 2 pi, 4 pi, ... for n = 1, 2, 3).
fn unit_sphere_area(n: usize) -> f64 {
    // omega_{n-1} = 2 pi^{n/2} / Gamma(n/2), with the Gamma evaluated by the
    // ascending recurrence from 1 or 1/2.
    let half_n = n as f64 / 2.0;
    let (mut gamma, mut x) = if n % 2 == 0 {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    while x + 1e-9 < half_n {
        gamma *= x;
        x += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(half_n) / gamma
}

/// Exact integral of x^k over [a, b].
fn moment(a: f64, b: f64, k: usize) -> f64 {
    let p = (k + 1) as i32;
    (b.powi(p) - a.powi(p)) / p as f64
}

impl Domain {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        spec.validate()?;
        let m = spec.resolution;
        let (nodes, h) = match spec.kind {
            DomainKind::Interval => {
                let b = spec.radius;
                let h = 2.0 * b / (m + 1) as f64;
                let nodes: Vec<f64> = (0..m + 2).map(|j| -b + j as f64 * h).collect();
                (nodes, h)
            }
            DomainKind::Ball => {
                let r = spec.radius;
                let h = r / m as f64;
                let nodes: Vec<f64> = (0..=m).map(|j| j as f64 * h).collect();
                (nodes, h)
            }
        };

        // Weight function of the radial measure: 1 on the interval,
        // omega_{n-1} r^{n-1} on the ball.
        let (omega, p) = match spec.kind {
            DomainKind::Interval => (1.0, 0usize),
            DomainKind::Ball => (unit_sphere_area(spec.dim), spec.dim - 1),
        };

        let last = nodes.len() - 1;
        let mut quad_weights = vec![0.0; nodes.len()];
        let mut face_measures = vec![0.0; last];
        for j in 0..last {
            let (a, b) = (nodes[j], nodes[j + 1]);
            let m0 = moment(a, b, p);
            let m1 = moment(a, b, p + 1);
            face_measures[j] = omega * m0;
            // Hat-function pieces of the linear interpolant on [a, b]:
            // node j carries (b - x)/h, node j+1 carries (x - a)/h.
            quad_weights[j] += omega * (b * m0 - m1) / h;
            quad_weights[j + 1] += omega * (m1 - a * m0) / h;
        }

        let (volume, boundary_measure) = match spec.kind {
            DomainKind::Interval => (2.0 * spec.radius, 2.0),
            DomainKind::Ball => {
                let n = spec.dim as f64;
                (
                    omega * spec.radius.powf(n) / n,
                    omega * spec.radius.powf(n - 1.0),
                )
            }
        };

        Ok(Self {
            id: spec.id(),
            convexity_constant: spec.radius,
            spec,
            nodes,
            quad_weights,
            volume,
            boundary_measure,
            h,
            face_measures,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// Number of interior (unknown) nodes; equals `spec.resolution`.
    pub fn interior_len(&self) -> usize {
        self.spec.resolution
    }

    /// Index range of the interior nodes inside `nodes`.
    pub fn interior_indices(&self) -> std::ops::Range<usize> {
        match self.spec.kind {
            DomainKind::Interval => 1..self.nodes.len() - 1,
            DomainKind::Ball => 0..self.nodes.len() - 1,
        }
    }

    pub fn is_interior(&self, j: usize) -> bool {
        self.interior_indices().contains(&j)
    }

    /// Builds a field by sampling `f` at every node (boundary included).
    pub fn field_from_fn(&self, f: impl Fn(f64) -> f64) -> DiscreteField {
        DiscreteField {
            values: self.nodes.iter().map(|&x| f(x)).collect(),
            domain_id: self.id,
        }
    }

    pub fn zero_field(&self) -> DiscreteField {
        self.field_from_fn(|_| 0.0)
    }

    /// Wraps raw node values, checking the length.
    pub fn field_from_values(&self, values: Vec<f64>) -> Result<DiscreteField> {
        if values.len() != self.nodes.len() {
            return Err(Error::InvalidInitialData(format!(
                "expected {} node values, got {}",
                self.nodes.len(),
                values.len()
            )));
        }
        Ok(DiscreteField {
            values,
            domain_id: self.id,
        })
    }

    pub fn check_bound(&self, f: &DiscreteField) -> Result<()> {
        if f.domain_id != self.id || f.values.len() != self.nodes.len() {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    /// Quadrature of the field over the domain, second-order accurate and
    /// exact for affine integrands.
    pub fn integrate(&self, f: &DiscreteField) -> Result<f64> {
        self.check_bound(f)?;
        Ok(self
            .quad_weights
            .iter()
            .zip(&f.values)
            .map(|(w, v)| w * v)
            .sum())
    }

    /// Quadrature of `g(f)` without materializing the mapped field.
    pub fn integrate_map(&self, f: &DiscreteField, g: impl Fn(f64) -> f64) -> Result<f64> {
        self.check_bound(f)?;
        Ok(self
            .quad_weights
            .iter()
            .zip(&f.values)
            .map(|(w, v)| w * g(*v))
            .sum())
    }

    /// Quadrature of `g(a, b)` over two fields on this domain.
    pub fn integrate_map2(
        &self,
        a: &DiscreteField,
        b: &DiscreteField,
        g: impl Fn(f64, f64) -> f64,
    ) -> Result<f64> {
        self.check_bound(a)?;
        self.check_bound(b)?;
        Ok(self
            .quad_weights
            .iter()
            .zip(a.values.iter().zip(&b.values))
            .map(|(w, (x, y))| w * g(*x, *y))
            .sum())
    }

    /// Pointwise Laplacian of the field; boundary entries of the result are 0.
    ///
    /// Uses the actual neighbor values, so fields that do not vanish on the
    /// boundary are differentiated correctly.
    pub fn apply_laplacian(&self, f: &DiscreteField) -> Result<DiscreteField> {
        self.check_bound(f)?;
        let v = &f.values;
        let h2 = self.h * self.h;
        let mut out = vec![0.0; v.len()];
        match self.spec.kind {
            DomainKind::Interval => {
                for j in 1..v.len() - 1 {
                    out[j] = (v[j - 1] - 2.0 * v[j] + v[j + 1]) / h2;
                }
            }
            DomainKind::Ball => {
                let n = self.spec.dim as f64;
                out[0] = 2.0 * n * (v[1] - v[0]) / h2;
                for j in 1..v.len() - 1 {
                    let second = (v[j - 1] - 2.0 * v[j] + v[j + 1]) / h2;
                    let first = (v[j + 1] - v[j - 1]) / (2.0 * self.h);
                    out[j] = second + (n - 1.0) / self.nodes[j] * first;
                }
            }
        }
        Ok(DiscreteField {
            values: out,
            domain_id: self.id,
        })
    }

    /// The matrix of -Laplacian restricted to interior nodes with zero
    /// Dirichlet data, in interior ordering.
    pub fn neg_laplacian(&self) -> Tridiagonal {
        let m = self.interior_len();
        let h2 = self.h * self.h;
        let mut diag = vec![2.0 / h2; m];
        let mut sub = vec![-1.0 / h2; m - 1];
        let mut sup = vec![-1.0 / h2; m - 1];
        if self.spec.kind == DomainKind::Ball {
            let n = self.spec.dim as f64;
            diag[0] = 2.0 * n / h2;
            sup[0] = -2.0 * n / h2;
            for i in 1..m {
                // Interior node index equals i for the ball layout.
                let c = (n - 1.0) / (2.0 * self.h * self.nodes[i]);
                sub[i - 1] = -(1.0 / h2 - c);
                if i + 1 < m {
                    sup[i] = -(1.0 / h2 + c);
                }
            }
        }
        Tridiagonal::new(diag, sub, sup)
    }

    /// Extracts interior node values in interior ordering.
    pub fn pack_interior(&self, f: &DiscreteField) -> Vec<f64> {
        self.interior_indices().map(|j| f.values[j]).collect()
    }

    /// Builds a field from interior values, zero on the boundary.
    pub fn unpack_interior(&self, interior: &[f64]) -> DiscreteField {
        let mut values = vec![0.0; self.nodes.len()];
        for (i, j) in self.interior_indices().enumerate() {
            values[j] = interior[i];
        }
        DiscreteField {
            values,
            domain_id: self.id,
        }
    }

    /// Solves -Laplacian g = rhs with zero Dirichlet data.
    ///
    /// The solve is direct, so the defect of the returned profile is
    /// rounding, not truncation. Applying the discrete Laplacian back
    /// amplifies node roundoff by roughly 1/h^2, which puts the residual
    /// near epsilon * m^2 relative to the data on an m-cell grid.
    pub fn solve_poisson(&self, rhs: &DiscreteField) -> Result<DiscreteField> {
        self.check_bound(rhs)?;
        let b = self.pack_interior(rhs);
        let x = self.neg_laplacian().solve(&b)?;
        Ok(self.unpack_interior(&x))
    }

    /// Dirichlet energy (1/2) integral |grad u|^2 of the linear interpolant.
    pub fn dirichlet_energy(&self, f: &DiscreteField) -> Result<f64> {
        self.check_bound(f)?;
        let v = &f.values;
        let mut acc = 0.0;
        for (j, fm) in self.face_measures.iter().enumerate() {
            let slope = (v[j + 1] - v[j]) / self.h;
            acc += fm * slope * slope;
        }
        Ok(0.5 * acc)
    }
}
