//! Convergence of matrix powers: eigenvalue clusters with their indices, the
//! limit of `A^k`, the subdominant modulus and empirical rate fits.

mod convergence;
mod eigen;
mod rate;

use serde::{Deserialize, Serialize};

use crate::linalg::{op_norm, Matrix};

pub use convergence::{
    classify_convergence, power_limit, spectral_projectors, ConvergenceReport, ConvergenceStatus,
    SpectralComponent,
};
pub use eigen::{eigen_structure, spectral_radius, subdominant_modulus, EigenCluster, EigenStructure};
pub use rate::{default_window_start, empirical_rate, RateFit};
pub(crate) use rate::least_squares_slope;

/// Complex scalar as it appears in reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl From<num_complex::Complex64> for ComplexValue {
    fn from(z: num_complex::Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for num_complex::Complex64 {
    fn from(z: ComplexValue) -> Self {
        Self::new(z.re, z.im)
    }
}

/// Numerical thresholds for the spectral decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Eigenvalues closer than this are one cluster.
    pub cluster_tol: f64,
    /// Singular values at or below this count as zero when taking ranks.
    pub rank_tol: f64,
    /// Width of the band around the unit circle (and around `1`) treated as "on" it.
    pub circle_tol: f64,
}

impl Tolerances {
    pub const DEFAULT_CIRCLE_TOL: f64 = 1e-7;

    /// Defaults scaled by `max(1, ‖A‖)`.
    pub fn for_matrix(a: &Matrix) -> Self {
        let scale = op_norm(a).max(1.0);
        Self {
            cluster_tol: 1e-7 * scale,
            rank_tol: f64::EPSILON.sqrt() * scale,
            circle_tol: Self::DEFAULT_CIRCLE_TOL,
        }
    }
}
