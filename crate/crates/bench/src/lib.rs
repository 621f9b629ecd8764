//! Fixtures shared by the criterion benchmarks.

use semiconv_core::bench::random_start;
use semiconv_core::{PairGeometry, Vector};

/// Pair in `R^n` with a one-dimensional intersection and angles spread over
/// `[theta_f, 1.4]`.
pub fn fixture_pair(n: usize, theta_f: f64) -> PairGeometry {
    let p = n / 3;
    let mut angles = vec![0.0];
    angles.extend((0..p - 1).map(|k| theta_f + (1.4 - theta_f) * k as f64 / (p - 1).max(1) as f64));
    PairGeometry::from_angles(n, &angles, p + 1, 17).expect("fixture angles are valid")
}

pub fn fixture_start(n: usize) -> Vector {
    random_start(n, 10.0, 23)
}
