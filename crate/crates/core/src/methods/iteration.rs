use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{build_operator, MethodSpec};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::spectral::least_squares_slope;
use crate::subspaces::PairGeometry;

/// `‖P_U x − P_U P_V x‖ ≤ DEGENERATE_TOL·‖x‖` selects `μ_x = 1`.
const DEGENERATE_TOL: f64 = 1e-14;

enum Kind {
    Linear(Matrix),
    /// `B_T` when `partial`, else `A_T`; holds `P_U P_V`.
    Adaptive { partial: bool, pupv: Matrix },
}

/// A method bound to a geometry with its operator precomputed.
pub struct Stepper<'g> {
    spec: MethodSpec,
    geom: &'g PairGeometry,
    kind: Kind,
}

impl<'g> Stepper<'g> {
    pub fn new(spec: MethodSpec, geom: &'g PairGeometry) -> Result<Self> {
        let kind = match spec {
            MethodSpec::AdaptiveProjection => Kind::Adaptive { partial: true, pupv: geom.alternating() },
            MethodSpec::LineSearch => Kind::Adaptive { partial: false, pupv: geom.alternating() },
            _ => Kind::Linear(build_operator(&spec, geom)?),
        };
        Ok(Self { spec, geom, kind })
    }

    pub fn spec(&self) -> MethodSpec {
        self.spec
    }

    /// One application of the method; the adaptive kinds also return the
    /// relaxation they used.
    pub fn step(&self, x: &Vector) -> (Vector, Option<f64>) {
        match &self.kind {
            Kind::Linear(op) => (op * x, None),
            Kind::Adaptive { partial, pupv } => {
                let pu_x = &self.geom.proj_u * x;
                let pv_x = &self.geom.proj_v * x;
                let t = pupv * x;
                // B_T relaxes between P_U x and P_U P_V x, A_T between x and P_U P_V x.
                let base = if *partial { pu_x.clone() } else { x.clone() };
                let diff = &base - &t;
                let dn = diff.norm();
                if dn <= DEGENERATE_TOL * x.norm() {
                    return (t, Some(1.0));
                }
                // ⟨P_U x − P_U P_V x, x⟩ = ⟨x − P_V x, P_U x − P_V x⟩, and A_T adds
                // ‖x − P_U x‖². Both forms only pair vectors that vanish at the
                // limit, so the numerator keeps its relative accuracy as x
                // converges instead of drowning in eps·‖x‖².
                let off_v = x - &pv_x;
                let mut num = off_v.dot(&(&pu_x - &pv_x));
                if !*partial {
                    num += (x - &pu_x).norm_squared();
                }
                let mu = num / (dn * dn);
                (base - diff * mu, Some(mu))
            }
        }
    }

    /// The sequence judged by the stopping rule: `P_V x` for DR, `x` otherwise.
    pub fn monitored(&self, x: &Vector) -> Vector {
        if self.spec.monitors_shadow() {
            &self.geom.proj_v * x
        } else {
            x.clone()
        }
    }

    /// Runs until the monitored distance to `U ∩ V` is at most `eps` or
    /// `max_iter` steps have been taken. `observe` sees every monitored
    /// iterate `(n, z_n, d_n, μ used to reach it)`.
    pub fn run<F>(&self, x0: &Vector, eps: f64, max_iter: usize, mut observe: F) -> Result<RunOutcome>
    where
        F: FnMut(usize, &Vector, f64, Option<f64>),
    {
        if x0.len() != self.geom.n() {
            return Err(Error::DimensionMismatch { expected: self.geom.n(), found: x0.len() });
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        if max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { index: 0 });
        }
        let mut x = x0.clone();
        let z = self.monitored(&x);
        let mut d = self.geom.distance_to_intersection(&z);
        observe(0, &z, d, None);
        if d <= eps {
            return Ok(RunOutcome { iterations: 0, terminated: true, final_distance: d });
        }
        for n in 1..=max_iter {
            let (next, mu) = self.step(&x);
            if next.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { index: n });
            }
            x = next;
            let z = self.monitored(&x);
            d = self.geom.distance_to_intersection(&z);
            observe(n, &z, d, mu);
            if d <= eps {
                return Ok(RunOutcome { iterations: n, terminated: true, final_distance: d });
            }
        }
        Ok(RunOutcome { iterations: max_iter, terminated: false, final_distance: d })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub iterations: usize,
    pub terminated: bool,
    pub final_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    /// `z_0, …, z_N`.
    pub iterates_monitored: Vec<Vector>,
    /// `d_{U∩V}(z_n)`.
    pub distances: Vec<f64>,
    pub terminated: bool,
    pub iterations: usize,
    /// `μ_x` per step for `B_T`/`A_T`, empty otherwise.
    pub mu_history: Vec<f64>,
}

impl IterationTrace {
    /// Geometric decay factor of the distances, fitted by least squares on
    /// `ln d_n` over the second half of the run. `None` with fewer than three
    /// positive samples.
    pub fn fitted_rate(&self) -> Option<f64> {
        let start = (self.distances.len() / 2).max(1);
        let points: Vec<(f64, f64)> = self
            .distances
            .iter()
            .enumerate()
            .skip(start)
            .filter(|(_, &d)| d > f64::MIN_POSITIVE)
            .map(|(n, &d)| (n as f64, d.ln()))
            .collect();
        (points.len() >= 3).then(|| least_squares_slope(&points).exp())
    }

    /// CSV with columns `n,d,mu_x`; `mu_x` is empty for `n = 0` and for
    /// linear methods.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv write failed: {e}"));
        w.write_record(["n", "d", "mu_x"]).map_err(io)?;
        for (n, d) in self.distances.iter().enumerate() {
            let mu = match n.checked_sub(1).and_then(|k| self.mu_history.get(k)) {
                Some(mu) => mu.to_string(),
                None => String::new(),
            };
            w.write_record([n.to_string(), d.to_string(), mu]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

/// Single application of `spec` to `x`.
pub fn step(spec: &MethodSpec, geom: &PairGeometry, x: &Vector) -> Result<(Vector, Option<f64>)> {
    if x.len() != geom.n() {
        return Err(Error::DimensionMismatch { expected: geom.n(), found: x.len() });
    }
    Ok(Stepper::new(*spec, geom)?.step(x))
}

/// Runs `spec` from `x0` and records the full monitored trajectory.
pub fn iterate(
    spec: &MethodSpec,
    geom: &PairGeometry,
    x0: &Vector,
    eps: f64,
    max_iter: usize,
) -> Result<IterationTrace> {
    let stepper = Stepper::new(*spec, geom)?;
    let mut iterates = Vec::new();
    let mut distances = Vec::new();
    let mut mu_history = Vec::new();
    let outcome = stepper.run(x0, eps, max_iter, |_, z, d, mu| {
        iterates.push(z.clone());
        distances.push(d);
        mu_history.extend(mu);
    })?;
    Ok(IterationTrace {
        iterates_monitored: iterates,
        distances,
        terminated: outcome.terminated,
        iterations: outcome.iterations,
        mu_history,
    })
}

/// Like [`iterate`] without storing the trajectory.
pub fn count_iterations(
    spec: &MethodSpec,
    geom: &PairGeometry,
    x0: &Vector,
    eps: f64,
    max_iter: usize,
) -> Result<RunOutcome> {
    Stepper::new(*spec, geom)?.run(x0, eps, max_iter, |_, _, _, _| {})
}
