use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::grid::{normalized_gap, CategoryGrid, Cell};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::subspaces::{PairGeometry, DEFAULT_ZERO_TOL};

const MAX_ATTEMPTS: usize = 1000;

/// Smallest Friedrichs angle drawn; anything near the zero-angle tolerance
/// would be counted as part of the intersection.
const MIN_THETA_F: f64 = 1e3 * DEFAULT_ZERO_TOL;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream-independent seed for a tuple of indices under `master`.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(master), |h, &p| splitmix64(h ^ splitmix64(p)))
}

/// Uniform point on the sphere of the given radius.
pub fn random_start(n: usize, radius: f64, seed: u64) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = g.norm();
        if norm > 0.0 {
            return g * (radius / norm);
        }
    }
}

/// Draws a pair in `cell`: dimensions `3 ≤ p ≤ n/2`, `p ≤ q ≤ n - p`,
/// `1 ≤ s ≤ p - 2` uniformly; `θ_F` uniform in the primary bin; the
/// normalized gap uniform in the secondary bin; the remaining angles uniform
/// in `(θ_F, θ_p)`. Draws whose re-measured angles leave the cell are
/// rejected.
pub fn sample_pair(cell: Cell, grid: &CategoryGrid, seed: u64) -> Result<PairGeometry> {
    grid.validate()?;
    let infeasible = |reason: String| Error::InfeasibleCell { cell: cell.to_string(), reason };
    if !(1..=grid.primary_bins.len()).contains(&cell.primary) || !(1..=grid.secondary_bins).contains(&cell.secondary)
    {
        return Err(infeasible("cell is outside the grid".into()));
    }
    let n = grid.ambient_dim;
    let (lo, hi) = grid.primary_bin(cell);
    let (g_lo, g_hi) = grid.gap_bin(cell);
    if hi <= MIN_THETA_F {
        return Err(infeasible(format!("Friedrichs-angle bin [{lo}, {hi}) is below {MIN_THETA_F}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let p = rng.random_range(3..=n / 2);
        let q = rng.random_range(p..=n - p);
        let s = rng.random_range(1..=p - 2);
        let theta_f = rng.random_range(lo.max(MIN_THETA_F)..hi);
        let gap = rng.random_range(g_lo..g_hi);
        if gap <= 0.0 {
            continue;
        }
        let theta_p = theta_f + gap * (FRAC_PI_2 - theta_f);
        let mut angles = vec![0.0; s];
        angles.push(theta_f);
        let mut interior: Vec<f64> = (0..p - s - 2).map(|_| rng.random_range(theta_f..theta_p)).collect();
        interior.sort_by(f64::total_cmp);
        angles.extend(interior);
        angles.push(theta_p);

        let geom = PairGeometry::from_angles(n, &angles, q, rng.random())?;
        let Some(measured_f) = geom.theta_f else { continue };
        if geom.s == s && grid.classify(measured_f, geom.theta_p) == Some(cell) {
            debug_assert!(normalized_gap(measured_f, geom.theta_p) >= g_lo);
            return Ok(geom);
        }
    }
    Err(infeasible(format!("no draw landed in the cell after {MAX_ATTEMPTS} attempts")))
}
