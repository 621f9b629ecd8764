use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::{eigen_structure, invariance_tol, invariant_basis, is_one};
use super::{EigenCluster, EigenStructure, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{is_idempotent, is_symmetric, sorted_svd, to_complex, CMatrix, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    Convergent,
    NotConvergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub status: ConvergenceStatus,
    /// `A^∞`, present iff convergent.
    #[serde(with = "crate::serde_matrix::option")]
    pub limit: Option<Matrix>,
    pub spectral_radius: f64,
    pub gamma: f64,
    pub subdominant_clusters: Vec<EigenCluster>,
    pub optimal_rate_attained: bool,
    pub limit_is_orthogonal_projector: bool,
    /// Borderline decisions near the unit circle.
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl ConvergenceReport {
    pub fn is_convergent(&self) -> bool {
        self.status == ConvergenceStatus::Convergent
    }
}

const PROJECTOR_TOL: f64 = 1e-9;

/// Decides whether `A^k` converges and, if so, computes `A^∞` and whether
/// `γ(A)` is attained as the optimal linear rate.
pub fn classify_convergence(a: &Matrix, tols: &Tolerances) -> Result<ConvergenceReport> {
    let es = eigen_structure(a, tols)?;
    let rho = es.spectral_radius();
    let mut warnings = Vec::new();

    let mut convergent = rho <= 1.0 + tols.circle_tol;
    for c in &es.clusters {
        if (c.modulus - 1.0).abs() > tols.circle_tol {
            continue;
        }
        if is_one(c.value.into(), tols.circle_tol) {
            if !c.semisimple {
                convergent = false;
            }
        } else {
            convergent = false;
            warnings.push(format!(
                "borderline: eigenvalue {:+.6e}{:+.6e}i has modulus within {:.1e} of 1 but is not 1",
                c.value.re, c.value.im, tols.circle_tol
            ));
        }
    }

    let gamma = es.subdominant_modulus(tols.circle_tol);
    // γ = 0 means A^k reaches A^∞ after finitely many steps; rate 0 is attained
    // regardless of nilpotent parts, so no cluster is reported as subdominant.
    let subdominant_clusters: Vec<EigenCluster> = if gamma > tols.cluster_tol {
        es.clusters
            .iter()
            .filter(|c| !is_one(c.value.into(), tols.circle_tol))
            .filter(|c| (c.modulus - gamma).abs() <= tols.cluster_tol)
            .cloned()
            .collect()
    } else {
        Vec::new()
    };

    let limit = if convergent { Some(limit_from_structure(a, &es, tols)?) } else { None };
    let optimal_rate_attained = convergent && subdominant_clusters.iter().all(|c| c.semisimple);
    let limit_is_orthogonal_projector = limit
        .as_ref()
        .is_some_and(|l| is_symmetric(l, PROJECTOR_TOL) && is_idempotent(l, PROJECTOR_TOL));

    Ok(ConvergenceReport {
        status: if convergent { ConvergenceStatus::Convergent } else { ConvergenceStatus::NotConvergent },
        limit,
        spectral_radius: rho,
        gamma,
        subdominant_clusters,
        optimal_rate_attained,
        limit_is_orthogonal_projector,
        warnings,
    })
}

/// `A^∞`: the projector onto `ker(A - I)` along `ran(A - I)`, built from bases of
/// the two subspaces rather than by powering.
pub fn power_limit(a: &Matrix, tols: &Tolerances) -> Result<Matrix> {
    let report = classify_convergence(a, tols)?;
    report.limit.ok_or(Error::NotConvergent)
}

fn limit_from_structure(a: &Matrix, es: &EigenStructure, tols: &Tolerances) -> Result<Matrix> {
    let n = a.nrows();
    let Some(unit) = es.unit_cluster(tols.circle_tol) else {
        return Ok(Matrix::zeros(n, n));
    };
    let one = Complex64::new(1.0, 0.0);
    let g = oblique_projector(&to_complex(a), one, unit.algebraic_multiplicity, tols)?;
    Ok(g.map(|z| z.re))
}

/// Projector onto the invariant subspace of the cluster at `value` along the
/// complementary invariant subspace: `K (W* K)^-1 W*` with `K` spanning the
/// right and `W` the left generalized eigenspace.
fn oblique_projector(a: &CMatrix, value: Complex64, mult: usize, tols: &Tolerances) -> Result<CMatrix> {
    let inv_tol = invariance_tol(tols);
    let cap = || Error::IndexCapExceeded { value: format!("{value}"), multiplicity: mult };
    let right = invariant_basis(a, value, mult, inv_tol).ok_or_else(cap)?;
    let left = invariant_basis(&a.adjoint(), value.conj(), mult, inv_tol).ok_or_else(cap)?;
    let coupling = left.adjoint() * &right;
    let (sigma, _, _) = sorted_svd(coupling.clone());
    let smallest = sigma.last().copied().unwrap_or(0.0);
    if smallest <= tols.rank_tol {
        return Err(Error::IllConditionedClusters { gap: smallest });
    }
    let inverse = coupling.try_inverse().ok_or(Error::IllConditionedClusters { gap: smallest })?;
    Ok(&right * inverse * left.adjoint())
}

/// One term of the spectral resolution: cluster, projector `G_i` and nilpotent
/// part `N_i = (A - λ_i I) G_i`.
#[derive(Debug, Clone)]
pub struct SpectralComponent {
    pub cluster: EigenCluster,
    pub projector: CMatrix,
    pub nilpotent: CMatrix,
}

pub fn spectral_projectors(a: &Matrix, tols: &Tolerances) -> Result<Vec<SpectralComponent>> {
    let es = eigen_structure(a, tols)?;
    let values: Vec<Complex64> = es.clusters.iter().map(|c| c.value.into()).collect();
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let gap = (values[i] - values[j]).norm();
            if gap <= tols.cluster_tol {
                return Err(Error::IllConditionedClusters { gap });
            }
        }
    }
    let ac = to_complex(a);
    let n = a.nrows();
    es.clusters
        .iter()
        .map(|c| {
            let value: Complex64 = c.value.into();
            let projector = oblique_projector(&ac, value, c.algebraic_multiplicity, tols)?;
            let nilpotent = (&ac - CMatrix::identity(n, n) * value) * &projector;
            Ok(SpectralComponent { cluster: c.clone(), projector, nilpotent })
        })
        .collect()
}
