//! Matrix builders and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use semiconv_core::subspaces::haar_orthogonal;
use semiconv_core::{Matrix, Vector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn orthogonal(n: usize, seed: u64) -> Matrix {
    haar_orthogonal(n, &mut rng(seed))
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Jordan block of size `k` at `value`.
pub fn jordan_block(value: f64, k: usize) -> Matrix {
    Matrix::from_fn(k, k, |i, j| {
        if i == j {
            value
        } else if j == i + 1 {
            1.0
        } else {
            0.0
        }
    })
}

/// `r` times the rotation by `phi`: eigenvalues `r e^{±i phi}`.
pub fn rotation_block(r: f64, phi: f64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[r * phi.cos(), -r * phi.sin(), r * phi.sin(), r * phi.cos()])
}

pub fn block_diag(blocks: &[Matrix]) -> Matrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Matrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
        at += b.nrows();
    }
    out
}

pub fn diag(values: &[f64]) -> Matrix {
    Matrix::from_diagonal(&Vector::from_row_slice(values))
}

pub fn conjugate(j: &Matrix, q: &Matrix) -> Matrix {
    q * j * q.transpose()
}

pub fn jordan_half() -> Matrix {
    Matrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.0, 0.5])
}

/// Largest singular value from the symmetric eigenproblem of `BᵀB`, with
/// `B = A / max|a_ij|` to stay clear of underflow.
pub fn op_norm(a: &Matrix) -> f64 {
    let scale = a.amax();
    if scale == 0.0 {
        return 0.0;
    }
    let b = a / scale;
    let top = (b.transpose() * &b).symmetric_eigen().eigenvalues.max();
    top.max(0.0).sqrt() * scale
}

/// Characteristic polynomial coefficients `c_0..c_n` (monic, `c_n = 1`) by the
/// Faddeev-LeVerrier recursion.
pub fn char_poly(a: &Matrix) -> Vec<f64> {
    let n = a.nrows();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        m = a * &m + Matrix::identity(n, n) * c[n - k + 1];
        c[n - k] = -(a * &m).trace() / k as f64;
    }
    c
}

/// All roots of a monic polynomial by Durand-Kerner iteration.
pub fn poly_roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * z + ci);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        for k in 0..n {
            let denom = (0..n).filter(|&j| j != k).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[k] - z[j]));
            let step = eval(z[k]) / denom;
            z[k] -= step;
        }
    }
    z
}

/// Orthogonal projector onto the column space of `m` (full column rank),
/// `M (MᵀM)⁻¹ Mᵀ`.
pub fn column_projector(m: &Matrix) -> Matrix {
    let gram = (m.transpose() * m).try_inverse().expect("full column rank");
    m * gram * m.transpose()
}
