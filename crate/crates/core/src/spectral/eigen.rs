use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexValue, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{ensure_square, op_norm_c, sorted_svd, to_complex, CMatrix, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    pub value: ComplexValue,
    pub modulus: f64,
    pub algebraic_multiplicity: usize,
    pub index: usize,
    pub semisimple: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenStructure {
    pub clusters: Vec<EigenCluster>,
    pub cluster_tol: f64,
    pub rank_tol_policy: String,
}

impl EigenStructure {
    pub fn spectral_radius(&self) -> f64 {
        self.clusters.iter().map(|c| c.modulus).fold(0.0, f64::max)
    }

    /// Cluster equal to `1` within `tol`, if any.
    pub fn unit_cluster(&self, tol: f64) -> Option<&EigenCluster> {
        self.clusters.iter().find(|c| is_one(c.value.into(), tol))
    }

    pub fn subdominant_modulus(&self, tol: f64) -> f64 {
        self.clusters
            .iter()
            .filter(|c| !is_one(c.value.into(), tol))
            .map(|c| c.modulus)
            .fold(0.0, f64::max)
    }
}

pub(crate) fn is_one(z: Complex64, tol: f64) -> bool {
    (z - Complex64::new(1.0, 0.0)).norm() <= tol
}

pub(crate) fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    let n = ensure_square(a)?;
    let m = faer::Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)]);
    m.eigenvalues().map_err(|_| Error::EigenSolverFailed)
}

/// Single-linkage clustering of the eigenvalues; each cluster is represented by
/// its mean, which is far more accurate than the individual members when the
/// cluster comes from a defective eigenvalue.
pub(crate) fn cluster_eigenvalues(a: &Matrix, cluster_tol: f64) -> Result<Vec<(Complex64, usize)>> {
    let values = eigenvalues(a)?;
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= cluster_tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += values[i];
                g.2 += 1;
            }
            None => groups.push((root, values[i], 1)),
        }
    }
    let mut clusters: Vec<(Complex64, usize)> = groups
        .into_iter()
        .map(|(_, sum, count)| {
            let mut mean = sum / count as f64;
            if mean.im.abs() <= cluster_tol {
                mean.im = 0.0;
            }
            (mean, count)
        })
        .collect();
    clusters.sort_by(|x, y| {
        y.0.norm()
            .total_cmp(&x.0.norm())
            .then(y.0.re.total_cmp(&x.0.re))
            .then(y.0.im.total_cmp(&x.0.im))
    });
    Ok(clusters)
}

/// Orthonormal basis of the invariant subspace belonging to the eigenvalue
/// cluster at `shift`, i.e. `ker((A - shift I)^k)` for the smallest `k` whose
/// `mult` trailing right singular vectors are annihilated by the power and
/// span an invariant subspace.
pub(crate) fn invariant_basis(a: &CMatrix, shift: Complex64, mult: usize, inv_tol: f64) -> Option<CMatrix> {
    let n = a.nrows();
    let shifted = a - CMatrix::identity(n, n) * shift;
    let scale = op_norm_c(&shifted).max(1.0);
    let mut power = shifted.clone();
    for j in 1..=mult {
        if j > 1 {
            power = &power * &shifted;
        }
        let (sigma, _, v) = sorted_svd(power.clone());
        // the power must (numerically) annihilate the candidate, and the
        // candidate must be invariant; either alone admits spurious subspaces
        if sigma[n - mult] > inv_tol * scale.powi(j as i32) {
            continue;
        }
        let basis = v.columns(n - mult, mult).into_owned();
        let restricted = basis.adjoint() * &shifted * &basis;
        let residual = &shifted * &basis - &basis * &restricted;
        if op_norm_c(&residual) <= inv_tol {
            return Some(basis);
        }
    }
    None
}

fn numerical_rank(m: &CMatrix, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    crate::linalg::singular_values(m).iter().filter(|&&s| s > tol).count()
}

/// Smallest `k` with `rank(N^k) = rank(N^(k+1))`, capped at the dimension.
///
/// `N` is `A - λI` restricted to the cluster's invariant subspace. On the
/// complementary invariant subspace `A - λI` is invertible, so
/// `rank((A - λI)^k) = (n - m) + rank(N^k)` and the stabilization points agree.
fn stabilization_index(nil: &CMatrix, rank_tol: f64) -> Option<usize> {
    let m = nil.nrows();
    let mut power = nil.clone();
    let mut rank = numerical_rank(&power, rank_tol);
    for k in 1..=m {
        let next = &power * nil;
        let next_rank = numerical_rank(&next, rank_tol);
        if next_rank == rank {
            return Some(k);
        }
        power = next;
        rank = next_rank;
    }
    None
}

pub(crate) fn invariance_tol(tols: &Tolerances) -> f64 {
    // rank_tol already carries the max(1, ‖A‖) scale
    1e2 * tols.rank_tol
}

/// Clustered spectrum with algebraic multiplicities, indices and semisimple flags.
pub fn eigen_structure(a: &Matrix, tols: &Tolerances) -> Result<EigenStructure> {
    if !(tols.cluster_tol > 0.0 && tols.rank_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    let raw = cluster_eigenvalues(a, tols.cluster_tol)?;
    let ac = to_complex(a);
    let mut clusters: Vec<EigenCluster> = Vec::with_capacity(raw.len());
    for &(value, mult) in &raw {
        // conjugate clusters of a real matrix share multiplicity and index
        if value.im < 0.0 {
            if let Some(partner) = clusters.iter().find(|c| {
                (Complex64::from(c.value) - value.conj()).norm() <= tols.cluster_tol
                    && c.algebraic_multiplicity == mult
            }) {
                let index = partner.index;
                clusters.push(EigenCluster {
                    value: value.into(),
                    modulus: value.norm(),
                    algebraic_multiplicity: mult,
                    index,
                    semisimple: index == 1,
                });
                continue;
            }
        }
        let cap_error = || Error::IndexCapExceeded { value: format!("{value}"), multiplicity: mult };
        let basis = invariant_basis(&ac, value, mult, invariance_tol(tols)).ok_or_else(cap_error)?;
        let shifted = &ac - CMatrix::identity(ac.nrows(), ac.nrows()) * value;
        let nil = basis.adjoint() * shifted * &basis;
        let index = stabilization_index(&nil, tols.rank_tol).ok_or_else(cap_error)?;
        clusters.push(EigenCluster {
            value: value.into(),
            modulus: value.norm(),
            algebraic_multiplicity: mult,
            index,
            semisimple: index == 1,
        });
    }
    // keep conjugate partners adjacent in a stable order
    clusters.sort_by(|x, y| {
        y.modulus
            .total_cmp(&x.modulus)
            .then(y.value.re.total_cmp(&x.value.re))
            .then(y.value.im.total_cmp(&x.value.im))
    });
    Ok(EigenStructure {
        clusters,
        cluster_tol: tols.cluster_tol,
        rank_tol_policy: format!(
            "singular values of the nilpotent restriction above {:.3e} (sqrt(eps)*max(1,||A||) by default)",
            tols.rank_tol
        ),
    })
}

/// `ρ(A)`: the largest eigenvalue modulus.
pub fn spectral_radius(a: &Matrix) -> Result<f64> {
    let tols = Tolerances::for_matrix(a);
    Ok(cluster_eigenvalues(a, tols.cluster_tol)?
        .iter()
        .map(|(z, _)| z.norm())
        .fold(0.0, f64::max))
}

/// `γ(A)`: the largest modulus over `{0} ∪ σ(A) \ {1}`.
pub fn subdominant_modulus(a: &Matrix) -> Result<f64> {
    let tols = Tolerances::for_matrix(a);
    Ok(cluster_eigenvalues(a, tols.cluster_tol)?
        .iter()
        .filter(|(z, _)| !is_one(*z, tols.cluster_tol))
        .map(|(z, _)| z.norm())
        .fold(0.0, f64::max))
}
