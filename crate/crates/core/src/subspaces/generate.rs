use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Subspace;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of `R`'s diagonal folded into `Q`.
pub fn haar_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut *rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Random pair `(U, V)` in `R^n` with `dim U = angles.len()`, `dim V = q` and
/// the given principal angles. Works in a rotated copy of the block form
///
/// ```text
/// P_U = D diag(I_p, 0_p, 0_{q-p}, 0) Dᵀ
/// P_V = D [[C², CS], [CS, S²]] ⊕ I_{q-p} ⊕ 0  Dᵀ
/// ```
/// with `C = diag(cos θ_k)`, `S = diag(sin θ_k)` and `D` Haar-random from `seed`.
pub fn canonical_pair(n: usize, angles: &[f64], q: usize, seed: u64) -> Result<(Subspace, Subspace)> {
    let p = angles.len();
    if p == 0 {
        return Err(Error::InvalidArgument("at least one angle is required".into()));
    }
    if p > q || p + q > n {
        return Err(Error::InvalidArgument(format!(
            "need p <= q and p + q <= n, got p = {p}, q = {q}, n = {n}"
        )));
    }
    if angles.iter().any(|t| !(0.0..=FRAC_PI_2).contains(t)) {
        return Err(Error::InvalidArgument("angles must lie in [0, pi/2]".into()));
    }
    if angles.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("angles must be ascending".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = haar_orthogonal(n, &mut rng);

    let u = d.columns(0, p).into_owned();
    let mut v = Matrix::zeros(n, q);
    for (k, t) in angles.iter().enumerate() {
        let (s, c) = t.sin_cos();
        v.set_column(k, &(d.column(k) * c + d.column(p + k) * s));
    }
    for j in 0..(q - p) {
        v.set_column(p + j, &d.column(2 * p + j));
    }
    Ok((Subspace::from_orthonormal(u)?, Subspace::from_orthonormal(v)?))
}
