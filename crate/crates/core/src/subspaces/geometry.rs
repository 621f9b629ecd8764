use serde::{Deserialize, Serialize};

use super::{canonical_pair, intersection, principal_angles, Subspace, DEFAULT_ZERO_TOL};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Everything the iteration methods need about a pair `dim U ≤ dim V`: the
/// principal angles, `s = dim(U ∩ V)`, `θ_F`, `θ_p` and the three projectors.
#[derive(Debug, Clone)]
pub struct PairGeometry {
    pub u: Subspace,
    pub v: Subspace,
    pub intersection: Subspace,
    pub angles: Vec<f64>,
    pub s: usize,
    pub theta_f: Option<f64>,
    pub theta_p: f64,
    pub proj_u: Matrix,
    pub proj_v: Matrix,
    pub proj_m: Matrix,
}

impl PairGeometry {
    pub fn new(u: Subspace, v: Subspace, zero_tol: f64) -> Result<Self> {
        if u.dim() > v.dim() {
            return Err(Error::InvalidArgument(format!(
                "expected dim U <= dim V, got {} > {}",
                u.dim(),
                v.dim()
            )));
        }
        let angles = principal_angles(&u, &v)?;
        let s = angles.iter().filter(|&&t| t <= zero_tol).count();
        let theta_f = angles.get(s).copied();
        let theta_p = *angles.last().expect("nonempty: dim U >= 1");
        let m = intersection(&u, &v, zero_tol)?;
        Ok(Self {
            proj_u: u.projector(),
            proj_v: v.projector(),
            proj_m: m.projector(),
            u,
            v,
            intersection: m,
            angles,
            s,
            theta_f,
            theta_p,
        })
    }

    /// Generated pair with the given angles (see [`canonical_pair`]).
    pub fn from_angles(n: usize, angles: &[f64], q: usize, seed: u64) -> Result<Self> {
        let (u, v) = canonical_pair(n, angles, q, seed)?;
        Self::new(u, v, DEFAULT_ZERO_TOL)
    }

    pub fn n(&self) -> usize {
        self.u.ambient_dim()
    }

    pub fn p(&self) -> usize {
        self.u.dim()
    }

    pub fn q(&self) -> usize {
        self.v.dim()
    }

    pub fn theta_f(&self) -> Result<f64> {
        self.theta_f.ok_or(Error::FriedrichsUndefined)
    }

    /// `sin²θ_F`.
    pub fn sin2_f(&self) -> Result<f64> {
        Ok(self.theta_f()?.sin().powi(2))
    }

    /// `sin²θ_p`.
    pub fn sin2_p(&self) -> f64 {
        self.theta_p.sin().powi(2)
    }

    /// `P_U P_V`.
    pub fn alternating(&self) -> Matrix {
        &self.proj_u * &self.proj_v
    }

    /// `P_U P_V + P_{U⊥} P_{V⊥}`.
    pub fn douglas_rachford(&self) -> Matrix {
        let n = self.n();
        let id = Matrix::identity(n, n);
        &self.proj_u * &self.proj_v + (&id - &self.proj_u) * (&id - &self.proj_v)
    }

    /// Projector onto `(U ∩ V) ⊕ (U⊥ ∩ V⊥)`, the fixed space of the
    /// Douglas-Rachford operator.
    pub fn fix_dr_projector(&self) -> Result<Matrix> {
        let both_perp = intersection(&self.u.complement(), &self.v.complement(), DEFAULT_ZERO_TOL)?;
        Ok(&self.proj_m + both_perp.projector())
    }

    /// `d_{U∩V}(x) = ‖x - P_M x‖`.
    pub fn distance_to_intersection(&self, x: &crate::linalg::Vector) -> f64 {
        (x - &self.proj_m * x).norm()
    }

    pub fn summary(&self) -> GeometrySummary {
        GeometrySummary {
            n: self.n(),
            p: self.p(),
            q: self.q(),
            angles: self.angles.iter().map(|&t| round_sig(t)).collect(),
            s: self.s,
            theta_f: self.theta_f.map(round_sig),
            theta_p: round_sig(self.theta_p),
        }
    }
}

/// JSON view of a [`PairGeometry`]; angles in radians rounded to 15
/// significant digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub angles: Vec<f64>,
    pub s: usize,
    /// `null` when `U ⊆ V`.
    pub theta_f: Option<f64>,
    pub theta_p: f64,
}

fn round_sig(x: f64) -> f64 {
    format!("{x:.14e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_json_round_trips() {
        let g = PairGeometry::from_angles(9, &[0.0, 0.3, 1.1], 4, 2).unwrap();
        let summary = g.summary();
        assert_eq!(summary.s, 1);
        let json = serde_json::to_string(&summary).unwrap();
        let back: GeometrySummary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, summary);
    }

    #[test]
    fn nested_pair_has_no_friedrichs_angle() {
        let g = PairGeometry::from_angles(6, &[0.0, 0.0], 2, 4).unwrap();
        assert_eq!(g.s, 2);
        assert!(g.theta_f.is_none());
        assert_eq!(g.theta_f(), Err(Error::FriedrichsUndefined));
        assert!(serde_json::to_string(&g.summary()).unwrap().contains("\"theta_f\":null"));
    }

    #[test]
    fn requires_smaller_first() {
        let (u, v) = canonical_pair(6, &[0.2], 2, 1).unwrap();
        assert!(PairGeometry::new(v, u, DEFAULT_ZERO_TOL).is_err());
    }
}
