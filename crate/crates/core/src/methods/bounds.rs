use serde::{Deserialize, Serialize};

use super::{MethodSpec, Stepper};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::subspaces::PairGeometry;

/// Per-step roundoff allowance, in units of `eps·‖x‖`, added to each bound so
/// that iterates sitting at machine precision do not register as violations.
const FLOOR_UNITS: f64 = 64.0;

/// Outcome of checking an error bound along an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub pass: bool,
    /// Largest `lhs / (bound + floor)` seen; `pass` iff `≤ 1 + 1e-9`.
    pub worst_ratio: f64,
    /// Whether the sharper bounds for starts in `U` were also checked.
    pub checked_start_in_u: bool,
    /// Largest ratio against the `cos²θ_F` constant applied to every start.
    /// That constant is only valid for starts in `U`; this field shows by how
    /// much general starts exceed it.
    pub cos2_constant_ratio: f64,
}

const RATIO_SLACK: f64 = 1e-9;

/// Checks `‖B_T^{n+1} x0 − P_M x0‖ ≤ γ^n c ‖x0 − P_M x0‖` for `0 ≤ n ≤ n_max`,
/// with `γ` the best partial-relaxation rate and `c = ‖P_U P_V − P_M‖ = cos θ_F`.
/// When `x0 ∈ U` the constant sharpens to `c = cos²θ_F` and
/// `‖B_T^{n+1} x0 − P_M x0‖ ≤ γ^{n+1} ‖x0 − P_M x0‖` is checked as well.
pub fn verify_bt_bound(geom: &PairGeometry, x0: &Vector, n_max: usize) -> Result<BoundCheck> {
    check_len(geom, x0)?;
    let (gamma, cf) = constants(geom)?;
    let y = &geom.proj_m * x0;
    let r0 = (x0 - &y).norm();
    let in_u = starts_in_u(geom, x0);
    let c = if in_u { cf * cf } else { cf };
    let floor = floor(x0, n_max);
    let stepper = Stepper::new(MethodSpec::AdaptiveProjection, geom)?;

    let mut worst = 0.0f64;
    let mut cos2_worst = 0.0f64;
    let mut x = x0.clone();
    for n in 0..=n_max {
        x = stepper.step(&x).0;
        let lhs = (&x - &y).norm();
        let g_n = gamma.powi(n as i32);
        worst = worst.max(lhs / (g_n * c * r0 + floor));
        cos2_worst = cos2_worst.max(lhs / (g_n * cf * cf * r0 + floor));
        if in_u {
            worst = worst.max(lhs / (g_n * gamma * r0 + floor));
        }
    }
    Ok(BoundCheck {
        pass: worst <= 1.0 + RATIO_SLACK,
        worst_ratio: worst,
        checked_start_in_u: in_u,
        cos2_constant_ratio: cos2_worst,
    })
}

/// Checks `‖A_T^n(T x) − P_M x‖ ≤ γ^n c ‖x − P_M x‖` for `0 ≤ n ≤ n_max`,
/// where `T = P_U P_V`, `c = cos θ_F`, or `c = cos²θ_F` when `x ∈ U`.
pub fn verify_at_bound(geom: &PairGeometry, x: &Vector, n_max: usize) -> Result<BoundCheck> {
    check_len(geom, x)?;
    let (gamma, cf) = constants(geom)?;
    let y = &geom.proj_m * x;
    let r0 = (x - &y).norm();
    let in_u = starts_in_u(geom, x);
    let c = if in_u { cf * cf } else { cf };
    let floor = floor(x, n_max);
    let stepper = Stepper::new(MethodSpec::LineSearch, geom)?;

    let mut worst = 0.0f64;
    let mut cos2_worst = 0.0f64;
    let mut z = geom.alternating() * x;
    for n in 0..=n_max {
        let lhs = (&z - &y).norm();
        let g_n = gamma.powi(n as i32);
        worst = worst.max(lhs / (g_n * c * r0 + floor));
        cos2_worst = cos2_worst.max(lhs / (g_n * cf * cf * r0 + floor));
        z = stepper.step(&z).0;
    }
    Ok(BoundCheck {
        pass: worst <= 1.0 + RATIO_SLACK,
        worst_ratio: worst,
        checked_start_in_u: in_u,
        cos2_constant_ratio: cos2_worst,
    })
}

fn starts_in_u(geom: &PairGeometry, x: &Vector) -> bool {
    (x - &geom.proj_u * x).norm() <= 1e-12 * x.norm()
}

fn check_len(geom: &PairGeometry, x: &Vector) -> Result<()> {
    if x.len() != geom.n() {
        return Err(Error::DimensionMismatch { expected: geom.n(), found: x.len() });
    }
    Ok(())
}

/// `(γ, cos θ_F)`.
fn constants(geom: &PairGeometry) -> Result<(f64, f64)> {
    let sf = geom.sin2_f()?;
    let sp = geom.sin2_p();
    Ok(((sp - sf) / (sf + sp), geom.theta_f()?.cos()))
}

fn floor(x: &Vector, n_max: usize) -> f64 {
    FLOOR_UNITS * (n_max + 1) as f64 * f64::EPSILON * x.norm()
}
