//! Subspaces of `R^n` held as orthonormal bases, principal angles between
//! pairs, and a seeded generator for pairs with prescribed angles.

mod angles;
mod generate;
mod geometry;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sorted_svd, Matrix};

pub use angles::{friedrichs, intersection, principal_angles, DEFAULT_ZERO_TOL};
pub use generate::{canonical_pair, haar_orthogonal};
pub use geometry::{GeometrySummary, PairGeometry};

const ORTHONORMAL_TOL: f64 = 1e-10;

/// A subspace of `R^n` given by an `n x p` matrix with orthonormal columns.
/// `p = 0` encodes `{0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    #[serde(with = "crate::serde_matrix")]
    basis: Matrix,
}

impl Subspace {
    pub fn from_orthonormal(basis: Matrix) -> Result<Self> {
        let p = basis.ncols();
        let gram = basis.transpose() * &basis;
        let err = (gram - Matrix::identity(p, p)).amax();
        if p > 0 && !(err <= ORTHONORMAL_TOL) {
            return Err(Error::InvalidArgument(format!(
                "basis columns are not orthonormal (deviation {err:.2e})"
            )));
        }
        Ok(Self { basis })
    }

    /// Column space of `m`, with numerical rank decided against `rank_tol`
    /// (default `max(n, k) * eps * σ_max`).
    pub fn from_spanning(m: &Matrix, rank_tol: Option<f64>) -> Self {
        let n = m.nrows();
        if m.ncols() == 0 || n == 0 {
            return Self::zero(n);
        }
        let (sigma, u, _) = sorted_svd(m.clone());
        let largest = sigma.first().copied().unwrap_or(0.0);
        let tol = rank_tol.unwrap_or(n.max(m.ncols()) as f64 * f64::EPSILON * largest);
        let rank = sigma.iter().filter(|&&s| s > tol).count();
        Self { basis: u.columns(0, rank).into_owned() }
    }

    pub fn zero(n: usize) -> Self {
        Self { basis: Matrix::zeros(n, 0) }
    }

    pub fn full(n: usize) -> Self {
        Self { basis: Matrix::identity(n, n) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// `{0}` or the whole space.
    pub fn is_degenerate(&self) -> bool {
        self.dim() == 0 || self.dim() == self.ambient_dim()
    }

    /// Orthogonal projector `Q Qᵀ`.
    pub fn projector(&self) -> Matrix {
        &self.basis * self.basis.transpose()
    }

    /// Orthogonal complement.
    pub fn complement(&self) -> Self {
        let n = self.ambient_dim();
        let p = self.dim();
        if p == 0 {
            return Self::full(n);
        }
        if p == n {
            return Self::zero(n);
        }
        let residual = Matrix::identity(n, n) - self.projector();
        let (_, u, _) = sorted_svd(residual);
        Self { basis: u.columns(0, n - p).into_owned() }
    }

    pub fn contains(&self, x: &crate::linalg::Vector, tol: f64) -> bool {
        (x - self.projector() * x).norm() <= tol * x.norm().max(1.0)
    }
}
