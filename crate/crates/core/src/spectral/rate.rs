use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_square, op_norm, Matrix};

/// Residual norms below this are treated as underflow and excluded from fits.
const UNDERFLOW_FLOOR: f64 = 1e-280;
/// Upper bound on the number of sampled powers entering the regression.
const MAX_SAMPLES: usize = 96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// `exp(slope)` of the least-squares line through `log ‖A^k - A^∞‖`.
    pub rate: f64,
    pub samples: usize,
    /// Samples dropped because the residual fell below the underflow floor.
    pub excluded: usize,
}

/// Default fit window start for a window ending at `k_max`.
pub fn default_window_start(k_max: usize) -> usize {
    (k_max / 4).max(5)
}

/// Fits the linear rate of `‖A^k - A^∞‖` over `k ∈ [k_min, k_max]`.
///
/// Powers are taken of `A - A^∞`, whose `k`-th power equals `A^k - A^∞` for a
/// convergent `A`; this keeps full relative accuracy where `A^k - A^∞` would
/// cancel catastrophically.
pub fn empirical_rate(a: &Matrix, a_inf: &Matrix, k_min: usize, k_max: usize) -> Result<RateFit> {
    let n = ensure_square(a)?;
    if a_inf.nrows() != n || a_inf.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a_inf.nrows() });
    }
    if k_min < 1 || k_max <= k_min {
        return Err(Error::InvalidArgument(format!("need 1 <= k_min < k_max, got [{k_min}, {k_max}]")));
    }
    let stride = (k_max - k_min + 1).div_ceil(MAX_SAMPLES).max(1);
    let diff = a - a_inf;
    let mut power = diff.clone();
    let mut points = Vec::new();
    let mut excluded = 0;
    for k in 1..=k_max {
        if k > 1 {
            power = &power * &diff;
        }
        if k >= k_min && (k - k_min) % stride == 0 {
            let norm = op_norm(&power);
            if norm > UNDERFLOW_FLOOR && norm.is_finite() {
                points.push((k as f64, norm.ln()));
            } else {
                excluded += 1;
            }
        }
    }
    if points.len() < 3 {
        return Err(Error::InsufficientSamples { usable: points.len() });
    }
    Ok(RateFit { rate: least_squares_slope(&points).exp(), samples: points.len(), excluded })
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    sxy / sxx
}
