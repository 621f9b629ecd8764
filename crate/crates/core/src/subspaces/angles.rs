use super::Subspace;
use crate::error::{Error, Result};
use crate::linalg::{sorted_svd, Matrix};

/// Angles at or below this (radians) count as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

fn check_pair(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: u.ambient_dim(), found: v.ambient_dim() });
    }
    for (name, s) in [("U", u), ("V", v)] {
        if s.dim() == 0 {
            return Err(Error::DegenerateSubspace(format!("{name} is {{0}}")));
        }
        if s.dim() == s.ambient_dim() {
            return Err(Error::DegenerateSubspace(format!("{name} is the whole space")));
        }
    }
    Ok(())
}

/// Cosine and sine routes to the principal angles, plus the data needed to
/// extract the intersection.
struct AngleData {
    /// Ascending angles.
    angles: Vec<f64>,
    /// Orthonormal basis of the larger subspace.
    big_basis: Matrix,
    /// Right singular vectors of `(I - P_small) Q_big`, ordered by ascending sine.
    sine_vectors: Matrix,
}

fn angle_data(u: &Subspace, v: &Subspace) -> Result<AngleData> {
    check_pair(u, v)?;
    let (small, big) = if u.dim() <= v.dim() { (u, v) } else { (v, u) };
    let p = small.dim();
    let q = big.dim();
    let qa = small.basis();
    let qb = big.basis();

    let cross = qa.transpose() * qb;
    let (cosines, _, _) = sorted_svd(cross.clone());
    // singular values of (I - P_a) Q_b are the sines of the p angles and q - p ones
    let residual = qb - qa * &cross;
    let (mut sines, _, sine_vecs) = sorted_svd(residual);
    sines.reverse();
    let sine_vectors = Matrix::from_fn(q, q, |r, c| sine_vecs[(r, q - 1 - c)]);

    // small angles are resolved by their sines, large ones by their cosines
    let angles = (0..p)
        .map(|k| {
            let c = cosines[k].clamp(0.0, 1.0);
            let s = sines[k].clamp(0.0, 1.0);
            if s < c {
                s.asin()
            } else {
                c.acos()
            }
        })
        .collect();
    Ok(AngleData { angles, big_basis: qb.clone(), sine_vectors })
}

/// Principal angles `θ_1 ≤ … ≤ θ_p` in radians, `p = min(dim U, dim V)`.
pub fn principal_angles(u: &Subspace, v: &Subspace) -> Result<Vec<f64>> {
    Ok(angle_data(u, v)?.angles)
}

/// `s = dim(U ∩ V)` and the Friedrichs angle `θ_{s+1}`, absent when `U ⊆ V`
/// (or `V ⊆ U`).
pub fn friedrichs(u: &Subspace, v: &Subspace, zero_tol: f64) -> Result<(usize, Option<f64>)> {
    let angles = principal_angles(u, v)?;
    let s = angles.iter().filter(|&&t| t <= zero_tol).count();
    Ok((s, angles.get(s).copied()))
}

/// `U ∩ V`, spanned by the principal vectors whose angle is at most `zero_tol`.
pub fn intersection(u: &Subspace, v: &Subspace, zero_tol: f64) -> Result<Subspace> {
    let data = angle_data(u, v)?;
    let s = data.angles.iter().filter(|&&t| t <= zero_tol).count();
    let basis = &data.big_basis * data.sine_vectors.columns(0, s);
    Subspace::from_orthonormal(basis)
}
