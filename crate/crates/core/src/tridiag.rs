//! Tridiagonal systems.
//!
//! Every linear solve in this crate is a one-dimensional Dirichlet problem,
//! so the matrices are tridiagonal and the Thomas algorithm (an LU sweep
//! without pivoting) is all we need. The steady and parabolic solvers call
//! the same factorization thousands of times, hence the split between
//! [`Tridiagonal`] (assembly, matvec) and [`TridiagonalFactor`] (reusable
//! forward-eliminated form).

use crate::error::{Error, Result};

/// Tridiagonal matrix of order `n`, stored by diagonals.
///
/// `sub[i]` couples row `i + 1` to column `i`, `sup[i]` couples row `i` to
/// column `i + 1`; both have length `n - 1`.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub sub: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, sub: Vec<f64>, sup: Vec<f64>) -> Self {
        assert_eq!(sub.len() + 1, diag.len(), "subdiagonal length mismatch");
        assert_eq!(sup.len() + 1, diag.len(), "superdiagonal length mismatch");
        Self { diag, sub, sup }
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.order();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.sup[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// Returns `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> Tridiagonal {
        let mut out = self.clone();
        for d in &mut out.diag {
            *d += shift;
        }
        out
    }

    /// Returns `s * self`.
    pub fn scaled(&self, s: f64) -> Tridiagonal {
        let mut out = self.clone();
        for band in [&mut out.diag, &mut out.sub, &mut out.sup] {
            for v in band {
                *v *= s;
            }
        }
        out
    }

    /// Forward-eliminates once so repeated right-hand sides cost one sweep each.
    pub fn factor(&self) -> Result<TridiagonalFactor> {
        let n = self.order();
        let mut inv_pivot = vec![0.0; n];
        let mut sup_scaled = vec![0.0; n.saturating_sub(1)];
        let mut pivot = self.diag[0];
        for i in 0..n {
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::SingularSystem);
            }
            inv_pivot[i] = 1.0 / pivot;
            if i + 1 < n {
                sup_scaled[i] = self.sup[i] * inv_pivot[i];
                pivot = self.diag[i + 1] - self.sub[i] * sup_scaled[i];
            }
        }
        Ok(TridiagonalFactor {
            inv_pivot,
            sup_scaled,
            sub: self.sub.clone(),
        })
    }

    /// One-shot solve; prefer [`Tridiagonal::factor`] when reusing the matrix.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.factor()?.solve(rhs))
    }
}

/// Thomas-algorithm factorization of a [`Tridiagonal`].
#[derive(Debug, Clone)]
pub struct TridiagonalFactor {
    inv_pivot: Vec<f64>,
    sup_scaled: Vec<f64>,
    sub: Vec<f64>,
}

impl TridiagonalFactor {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.inv_pivot.len();
        assert_eq!(rhs.len(), n);
        let mut x = vec![0.0; n];
        // Forward sweep into x, then back substitution in place.
        x[0] = rhs[0] * self.inv_pivot[0];
        for i in 1..n {
            x[i] = (rhs[i] - self.sub[i - 1] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.sup_scaled[i] * x[i + 1];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = b with known x.
        let a = Tridiagonal::new(vec![2.0, 3.0, 2.0], vec![1.0, 1.0], vec![1.0, 1.0]);
        let x_true = [1.0, -2.0, 3.0];
        let b = a.matvec(&x_true);
        let x = a.solve(&b).unwrap();
        for (xi, ti) in x.iter().zip(x_true.iter()) {
            assert!((xi - ti).abs() < 1e-13, "got {xi}, want {ti}");
        }
    }

    #[test]
    fn reports_singular_matrix() {
        let a = Tridiagonal::new(vec![0.0, 1.0], vec![0.0], vec![0.0]);
        assert_eq!(a.solve(&[1.0, 1.0]), Err(Error::SingularSystem));
    }

    #[test]
    fn factor_reuse_matches_direct_solve() {
        let n = 50;
        let a = Tridiagonal::new(vec![2.5; n], vec![-1.0; n - 1], vec![-1.0; n - 1]);
        let f = a.factor().unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let x1 = f.solve(&b);
        let x2 = a.solve(&b).unwrap();
        assert_eq!(x1, x2);
    }
}
