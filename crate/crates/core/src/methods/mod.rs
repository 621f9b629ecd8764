//! Iteration operators on a subspace pair: relaxed alternating projections
//! `T_μ`, partially relaxed projections `S_μ`, generalized Douglas-Rachford
//! `R_μ`, and the adaptive maps `B_T` and `A_T` that pick their relaxation by
//! exact line search.

mod bounds;
mod iteration;
mod operators;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subspaces::PairGeometry;

pub use bounds::{verify_at_bound, verify_bt_bound, BoundCheck};
pub use iteration::{count_iterations, iterate, step, IterationTrace, RunOutcome, Stepper};
pub use operators::{build_operator, predict_rate, LimitTarget, RatePrediction};

/// Relaxation parameter, either fixed or resolved from the pair's angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relaxation {
    Value(f64),
    /// Parameter minimizing the predicted rate.
    Best,
    /// `1 / sin²θ_p` (partial relaxation only).
    InverseSin2P,
    /// `1/2 + 1 / sin²θ_p` (partial relaxation only).
    HalfPlusInverseSin2P,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSpec {
    /// `T_μ = (1 - μ) I + μ P_U P_V`.
    Relaxed(Relaxation),
    /// `S_μ = (1 - μ) P_U + μ P_U P_V`.
    PartialRelaxed(Relaxation),
    /// `R_μ = (1 - μ) I + μ (P_U P_V + P_{U⊥} P_{V⊥})`.
    RelaxedDouglasRachford(Relaxation),
    /// `P_U P_V`.
    AlternatingProjections,
    /// `R_1`, monitored through its `P_V` shadow.
    DouglasRachford,
    /// `B_T`: `S_μ` with `μ` chosen per iterate.
    AdaptiveProjection,
    /// `A_T`: `T_μ` with `μ` chosen per iterate.
    LineSearch,
}

impl MethodSpec {
    /// Operator kinds with a matrix.
    pub fn is_linear(&self) -> bool {
        !matches!(self, Self::AdaptiveProjection | Self::LineSearch)
    }

    /// DR is judged by `P_V` applied to its iterates, every other method by the
    /// iterates themselves.
    pub fn monitors_shadow(&self) -> bool {
        matches!(self, Self::DouglasRachford)
    }

    /// Concrete `μ` for the relaxed kinds (`None` for MAP, DR, B_T, A_T).
    pub fn mu(&self, geom: &PairGeometry) -> Result<Option<f64>> {
        let resolve = |r: &Relaxation, best: &dyn Fn() -> Result<f64>, allow_sin_p: bool| -> Result<f64> {
            match *r {
                Relaxation::Value(mu) if mu.is_finite() => Ok(mu),
                Relaxation::Value(mu) => Err(Error::InvalidArgument(format!("relaxation {mu} is not finite"))),
                Relaxation::Best => best(),
                Relaxation::InverseSin2P if allow_sin_p => Ok(1.0 / geom.sin2_p()),
                Relaxation::HalfPlusInverseSin2P if allow_sin_p => Ok(0.5 + 1.0 / geom.sin2_p()),
                _ => Err(Error::InvalidArgument(format!("{self} has no such relaxation"))),
            }
        };
        Ok(match self {
            Self::Relaxed(r) => Some(resolve(r, &|| Ok(2.0 / (1.0 + geom.sin2_f()?)), false)?),
            Self::PartialRelaxed(r) => {
                Some(resolve(r, &|| Ok(2.0 / (geom.sin2_f()? + geom.sin2_p())), true)?)
            }
            Self::RelaxedDouglasRachford(r) => Some(resolve(r, &|| Ok(1.0), false)?),
            _ => None,
        })
    }
}

impl fmt::Display for Relaxation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Value(mu) => write!(f, "{mu}"),
            Self::Best => f.write_str("best"),
            Self::InverseSin2P => f.write_str("mu2"),
            Self::HalfPlusInverseSin2P => f.write_str("mu3"),
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Relaxed(r) => write!(f, "T:{r}"),
            Self::PartialRelaxed(r) => write!(f, "S:{r}"),
            Self::RelaxedDouglasRachford(r) => write!(f, "R:{r}"),
            Self::AlternatingProjections => f.write_str("MAP"),
            Self::DouglasRachford => f.write_str("DR"),
            Self::AdaptiveProjection => f.write_str("BT"),
            Self::LineSearch => f.write_str("AT"),
        }
    }
}

impl FromStr for Relaxation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "best" => Ok(Self::Best),
            "mu2" => Ok(Self::InverseSin2P),
            "mu3" => Ok(Self::HalfPlusInverseSin2P),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|mu| mu.is_finite())
                .map(Self::Value)
                .ok_or_else(|| Error::InvalidArgument(format!("invalid relaxation {other:?}"))),
        }
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    /// Parses `T:μ`, `S:μ`, `R:μ` (μ decimal, `best`, or for `S` also `mu2`/`mu3`),
    /// `MAP`, `DR`, `BT` and `AT`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("unknown method {s:?}"));
        match s.to_ascii_uppercase().as_str() {
            "MAP" => return Ok(Self::AlternatingProjections),
            "DR" => return Ok(Self::DouglasRachford),
            "BT" => return Ok(Self::AdaptiveProjection),
            "AT" => return Ok(Self::LineSearch),
            _ => {}
        }
        let (kind, mu) = s.split_once(':').ok_or_else(bad)?;
        let relaxation: Relaxation = mu.parse()?;
        let spec = match kind.trim() {
            "T" => Self::Relaxed(relaxation),
            "S" => Self::PartialRelaxed(relaxation),
            "R" => Self::RelaxedDouglasRachford(relaxation),
            _ => return Err(bad()),
        };
        if !matches!(spec, Self::PartialRelaxed(_))
            && matches!(relaxation, Relaxation::InverseSin2P | Relaxation::HalfPlusInverseSin2P)
        {
            return Err(Error::InvalidArgument(format!("{mu} is only defined for S")));
        }
        Ok(spec)
    }
}

impl Serialize for MethodSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MethodSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_method_strings() {
        let cases = [
            ("T:1.5", MethodSpec::Relaxed(Relaxation::Value(1.5))),
            ("S:best", MethodSpec::PartialRelaxed(Relaxation::Best)),
            ("S:mu2", MethodSpec::PartialRelaxed(Relaxation::InverseSin2P)),
            ("S:mu3", MethodSpec::PartialRelaxed(Relaxation::HalfPlusInverseSin2P)),
            ("R:0.5", MethodSpec::RelaxedDouglasRachford(Relaxation::Value(0.5))),
            ("MAP", MethodSpec::AlternatingProjections),
            ("DR", MethodSpec::DouglasRachford),
            ("BT", MethodSpec::AdaptiveProjection),
            ("AT", MethodSpec::LineSearch),
        ];
        for (text, spec) in cases {
            assert_eq!(text.parse::<MethodSpec>().unwrap(), spec, "{text}");
            assert_eq!(spec.to_string(), text);
        }
    }

    #[test]
    fn rejects_malformed_methods() {
        for text in ["X:1", "T", "T:abc", "T:mu2", "S:inf", ""] {
            assert!(text.parse::<MethodSpec>().is_err(), "{text}");
        }
    }

    #[test]
    fn best_parameters_resolve_from_angles() {
        let g = PairGeometry::from_angles(10, &[0.0, std::f64::consts::FRAC_PI_6, std::f64::consts::FRAC_PI_3], 3, 1)
            .unwrap();
        let s_best = MethodSpec::PartialRelaxed(Relaxation::Best).mu(&g).unwrap().unwrap();
        assert!((s_best - 2.0).abs() < 1e-9, "{s_best}");
        let t_best = MethodSpec::Relaxed(Relaxation::Best).mu(&g).unwrap().unwrap();
        assert!((t_best - 2.0 / 1.25).abs() < 1e-9);
        let mu2 = MethodSpec::PartialRelaxed(Relaxation::InverseSin2P).mu(&g).unwrap().unwrap();
        assert!((mu2 - 4.0 / 3.0).abs() < 1e-9);
        assert_eq!(MethodSpec::DouglasRachford.mu(&g).unwrap(), None);
    }
}
