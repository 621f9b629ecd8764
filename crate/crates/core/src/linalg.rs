//! Small dense linear-algebra helpers shared by the analysis modules.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;
pub type CMatrix = DMatrix<Complex64>;

pub(crate) fn ensure_finite(a: &Matrix) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if !a[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub(crate) fn ensure_square(a: &Matrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if a.nrows() == 0 {
        return Err(Error::Empty);
    }
    ensure_finite(a)?;
    Ok(a.nrows())
}

/// Operator 2-norm (largest singular value). NaN for non-finite input.
pub fn op_norm(a: &Matrix) -> f64 {
    largest_singular_value(a)
}

pub fn op_norm_c(a: &CMatrix) -> f64 {
    largest_singular_value(a)
}

fn largest_singular_value<T: SvdScalar>(a: &DMatrix<T>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if !a.iter().all(|x| x.clone().modulus().is_finite()) {
        return f64::NAN;
    }
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn to_complex(a: &Matrix) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Scalars we can hand to faer. nalgebra 0.35's SVD loses accuracy on some
/// rank-deficient inputs when vectors are requested, so all decompositions
/// that need singular values go through faer.
pub(crate) trait SvdScalar: ComplexField<RealField = f64> + faer::traits::ComplexField<Real = f64> {}
impl SvdScalar for f64 {}
impl SvdScalar for Complex64 {}

/// faer copy of `a / scale` with `scale` the largest entry modulus; faer
/// underestimates singular values of matrices with entries near underflow.
fn to_faer<T: SvdScalar>(a: &DMatrix<T>) -> (faer::Mat<T>, f64) {
    let scale = a.iter().map(|x| x.clone().modulus()).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let inv = T::from_real(1.0 / scale);
    (faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].clone() * inv.clone()), scale)
}

/// Singular values in descending order.
pub(crate) fn singular_values<T: SvdScalar>(a: &DMatrix<T>) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let (m, scale) = to_faer(a);
    let s = m.singular_values().expect("SVD iteration failed on finite input");
    let mut s: Vec<f64> = s.into_iter().map(|x| x * scale).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Thin SVD with singular values in descending order: `(σ, U, V)` with
/// `a = U diag(σ) V*`.
pub(crate) fn sorted_svd<T: SvdScalar>(a: DMatrix<T>) -> (Vec<f64>, DMatrix<T>, DMatrix<T>) {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return (Vec::new(), DMatrix::zeros(m, 0), DMatrix::zeros(n, 0));
    }
    let (m_scaled, scale) = to_faer(&a);
    let svd = m_scaled.thin_svd().expect("SVD iteration failed on finite input");
    let sv = svd.S().column_vector();
    let (fu, fv) = (svd.U(), svd.V());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sv[j].clone().real().total_cmp(&sv[i].clone().real()));
    let sigma = order.iter().map(|&i| sv[i].clone().real() * scale).collect();
    let u = DMatrix::from_fn(m, k, |r, c| fu[(r, order[c])].clone());
    let v = DMatrix::from_fn(n, k, |r, c| fv[(r, order[c])].clone());
    (sigma, u, v)
}

/// Integer matrix power by repeated squaring.
pub fn mat_pow<T>(a: &DMatrix<T>, mut k: u32) -> DMatrix<T>
where
    T: ComplexField,
{
    let n = a.nrows();
    let mut result = DMatrix::<T>::identity(n, n);
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

pub(crate) fn is_symmetric(a: &Matrix, tol: f64) -> bool {
    (a - a.transpose()).amax() <= tol
}

pub(crate) fn is_idempotent(a: &Matrix, tol: f64) -> bool {
    (a * a - a).amax() <= tol
}
