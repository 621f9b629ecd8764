use serde::{Deserialize, Serialize};

use super::MethodSpec;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::subspaces::PairGeometry;

/// Projector that a convergent operator's powers approach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitTarget {
    /// `P_{U∩V}`.
    Intersection,
    /// `P_{(U∩V) ⊕ (U⊥∩V⊥)}`, the fixed space of the Douglas-Rachford operator.
    DouglasRachfordFixedSpace,
    /// `P_U` (partial relaxation with `μ = 0`).
    SubspaceU,
    /// The identity (`μ = 0` for `T` and `R`).
    Identity,
}

impl LimitTarget {
    pub fn projector(&self, geom: &PairGeometry) -> Result<Matrix> {
        let n = geom.n();
        Ok(match self {
            Self::Intersection => geom.proj_m.clone(),
            Self::DouglasRachfordFixedSpace => geom.fix_dr_projector()?,
            Self::SubspaceU => geom.proj_u.clone(),
            Self::Identity => Matrix::identity(n, n),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePrediction {
    /// The resolved `μ` (absent for the adaptive methods).
    pub mu: Option<f64>,
    /// `μ` interval `[lo, hi)` on which the linear operator converges.
    pub convergent_domain: Option<(f64, f64)>,
    /// Optimal rate at `mu`; `None` when `mu` lies outside the domain. For
    /// `B_T`/`A_T` this is the guaranteed rate of the error bound.
    pub gamma: Option<f64>,
    pub best_mu: f64,
    pub best_rate: f64,
    pub limit_target: LimitTarget,
}

/// Dense matrix of a linear method. DR yields `R`; its iterates are monitored
/// through `P_V` (see [`MethodSpec::monitors_shadow`]).
pub fn build_operator(spec: &MethodSpec, geom: &PairGeometry) -> Result<Matrix> {
    let n = geom.n();
    let id = Matrix::identity(n, n);
    let relax = |base: Matrix, target: Matrix, mu: f64| base * (1.0 - mu) + target * mu;
    match spec {
        MethodSpec::Relaxed(_) => {
            let mu = resolved_mu(spec, geom)?;
            Ok(relax(id, geom.alternating(), mu))
        }
        MethodSpec::PartialRelaxed(_) => {
            let mu = resolved_mu(spec, geom)?;
            Ok(relax(geom.proj_u.clone(), geom.alternating(), mu))
        }
        MethodSpec::RelaxedDouglasRachford(_) => {
            let mu = resolved_mu(spec, geom)?;
            Ok(relax(id, geom.douglas_rachford(), mu))
        }
        MethodSpec::AlternatingProjections => Ok(geom.alternating()),
        MethodSpec::DouglasRachford => Ok(geom.douglas_rachford()),
        MethodSpec::AdaptiveProjection | MethodSpec::LineSearch => {
            Err(Error::NonlinearMethod(spec.to_string()))
        }
    }
}

fn resolved_mu(spec: &MethodSpec, geom: &PairGeometry) -> Result<f64> {
    spec.mu(geom)?
        .ok_or_else(|| Error::InvalidArgument(format!("{spec} has no relaxation parameter")))
}

/// Predicted convergence domain, optimal rate and best parameter.
pub fn predict_rate(spec: &MethodSpec, geom: &PairGeometry) -> Result<RatePrediction> {
    let sf = geom.sin2_f()?;
    let sp = geom.sin2_p();
    let mu = spec.mu(geom)?;

    let t_best = 2.0 / (1.0 + sf);
    let t_rate = (1.0 - sf) / (1.0 + sf);
    let s_best = 2.0 / (sf + sp);
    let s_rate = (sp - sf) / (sf + sp);
    let cf2 = 1.0 - sf;

    let prediction = match spec {
        MethodSpec::Relaxed(_) | MethodSpec::AlternatingProjections => {
            let mu = mu.unwrap_or(1.0);
            let gamma = if mu == 0.0 {
                Some(0.0)
            } else if mu > 0.0 && mu <= t_best {
                Some(1.0 - mu * sf)
            } else if mu > t_best && mu < 2.0 {
                Some(mu - 1.0)
            } else {
                None
            };
            RatePrediction {
                mu: Some(mu),
                convergent_domain: Some((0.0, 2.0)),
                gamma,
                best_mu: t_best,
                best_rate: t_rate,
                limit_target: if mu == 0.0 { LimitTarget::Identity } else { LimitTarget::Intersection },
            }
        }
        MethodSpec::PartialRelaxed(_) => {
            let mu = mu.expect("partial relaxation resolves a parameter");
            let upper = 2.0 / sp;
            let gamma = if mu == 0.0 {
                Some(0.0)
            } else if mu > 0.0 && mu <= s_best {
                Some(1.0 - mu * sf)
            } else if mu > s_best && mu < upper {
                Some(mu * sp - 1.0)
            } else {
                None
            };
            RatePrediction {
                mu: Some(mu),
                convergent_domain: Some((0.0, upper)),
                gamma,
                best_mu: s_best,
                best_rate: s_rate,
                limit_target: if mu == 0.0 { LimitTarget::SubspaceU } else { LimitTarget::Intersection },
            }
        }
        MethodSpec::RelaxedDouglasRachford(_) | MethodSpec::DouglasRachford => {
            let mu = mu.unwrap_or(1.0);
            let gamma = if mu == 0.0 {
                Some(0.0)
            } else if mu > 0.0 && mu < 2.0 {
                Some((mu * (2.0 - mu) * cf2 + (1.0 - mu).powi(2)).sqrt())
            } else {
                None
            };
            RatePrediction {
                mu: Some(mu),
                convergent_domain: Some((0.0, 2.0)),
                gamma,
                best_mu: 1.0,
                best_rate: cf2.sqrt(),
                limit_target: if mu == 0.0 {
                    LimitTarget::Identity
                } else {
                    LimitTarget::DouglasRachfordFixedSpace
                },
            }
        }
        MethodSpec::AdaptiveProjection | MethodSpec::LineSearch => RatePrediction {
            mu: None,
            convergent_domain: None,
            gamma: Some(s_rate),
            best_mu: s_best,
            best_rate: s_rate,
            limit_target: LimitTarget::Intersection,
        },
    };
    Ok(prediction)
}
