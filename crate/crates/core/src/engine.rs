//! Model-agnostic QSL evaluation: norm-averaged speeds along a trajectory,
//! the unified bound, the derivative-bound check, and a Runge-Kutta
//! integrator used as an oracle for the closed-form dynamics.

use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::qubit::{
    bloch_to_density, density_to_bloch, norms, relative_purity, BlochState, Matrix2c,
    NormTriple,
};

/// A state trajectory ρ_t together with its generator L_t(ρ_t) = dρ_t/dt.
pub trait Trajectory {
    fn state_at(&self, t: f64) -> Result<Matrix2c>;

    fn generator_at(&self, t: f64) -> Result<Matrix2c>;

    /// Times in `(0, tau)` where the generator norms have kinks.
    fn breakpoints(&self, _tau: f64) -> Vec<f64> {
        Vec::new()
    }
}

/// Adapts a pair of closures to [`Trajectory`].
pub struct FnTrajectory<S, G> {
    pub state: S,
    pub generator: G,
}

impl<S, G> Trajectory for FnTrajectory<S, G>
where
    S: Fn(f64) -> Matrix2c,
    G: Fn(f64) -> Matrix2c,
{
    fn state_at(&self, t: f64) -> Result<Matrix2c> {
        Ok((self.state)(t))
    }

    fn generator_at(&self, t: f64) -> Result<Matrix2c> {
        Ok((self.generator)(t))
    }
}

/// All quantities of one QSL evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QslResult {
    pub theta: f64,
    pub purity0: f64,
    pub lambda_op: f64,
    pub lambda_hs: f64,
    pub lambda_tr: f64,
    pub tau_qsl_op: f64,
    pub tau_qsl_hs: f64,
    pub tau_qsl_tr: f64,
    pub tau_qsl_unified: f64,
    pub clamped: bool,
    pub degenerate: bool,
}

impl QslResult {
    pub fn speeds(&self) -> NormTriple {
        NormTriple {
            op: self.lambda_op,
            hs: self.lambda_hs,
            tr: self.lambda_tr,
        }
    }
}

/// A model's closed-form operator-norm bound next to the generic
/// three-norm evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelQsl {
    pub closed_form: f64,
    pub result: QslResult,
}

/// Time averages (1/τ)∫₀^τ ‖L_t(ρ_t)‖ dt for the operator, Hilbert-Schmidt
/// and trace norms.
pub fn averaged_speeds<T: Trajectory + ?Sized>(
    traj: &T,
    tau: f64,
    quad: &QuadratureConfig,
) -> Result<NormTriple> {
    if !(tau > 0.0) {
        return Err(QslError::param("tau", tau, "must be > 0"));
    }
    let integrand = |t: f64| {
        let n = norms(&traj.generator_at(t)?);
        Ok([n.op, n.hs, n.tr])
    };
    let [op, hs, tr] = integrate(integrand, 0.0, tau, &traj.breakpoints(tau), quad)?;
    Ok(NormTriple {
        op: op / tau,
        hs: hs / tau,
        tr: tr / tau,
    })
}

fn bound(deficit: f64, speed: f64) -> f64 {
    if speed > 0.0 {
        deficit / speed
    } else {
        0.0
    }
}

/// Assembles the three bounds sin²Θ·tr[ρ₀²]/Λ and their maximum.
pub fn unified_qsl(
    s0: &BlochState,
    state_tau: &Matrix2c,
    speeds: NormTriple,
    tau: f64,
) -> Result<QslResult> {
    for (name, v) in [("lambda_op", speeds.op), ("lambda_hs", speeds.hs), ("lambda_tr", speeds.tr)] {
        if !(v >= 0.0) {
            return Err(QslError::param(name, v, "speeds must be >= 0"));
        }
    }
    let st = density_to_bloch(state_tau)?;
    let rp = relative_purity(s0, &st);
    let degenerate = !(tau > 0.0)
        || (speeds.op == 0.0 && speeds.hs == 0.0 && speeds.tr == 0.0)
        || s0.is_maximally_mixed();
    let mut out = QslResult {
        theta: rp.theta,
        purity0: rp.purity0,
        lambda_op: speeds.op,
        lambda_hs: speeds.hs,
        lambda_tr: speeds.tr,
        clamped: rp.clamped,
        degenerate,
        ..Default::default()
    };
    if degenerate {
        return Ok(out);
    }
    out.tau_qsl_op = bound(rp.deficit, speeds.op);
    out.tau_qsl_hs = bound(rp.deficit, speeds.hs);
    out.tau_qsl_tr = bound(rp.deficit, speeds.tr);
    out.tau_qsl_unified = out.tau_qsl_op.max(out.tau_qsl_hs).max(out.tau_qsl_tr);
    Ok(out)
}

/// Generic pipeline: averaged speeds over the trajectory plus the unified
/// bound at the final state.
pub fn generic_qsl<T: Trajectory + ?Sized>(
    traj: &T,
    s0: &BlochState,
    tau: f64,
    quad: &QuadratureConfig,
) -> Result<QslResult> {
    let speeds = averaged_speeds(traj, tau, quad)?;
    unified_qsl(s0, &traj.state_at(tau)?, speeds, tau)
}

/// States that can be propagated by [`rk4`].
pub trait OdeState: Clone {
    /// Returns `self + factor · other`.
    fn add_scaled(&self, other: &Self, factor: f64) -> Self;
}

impl OdeState for Matrix2c {
    fn add_scaled(&self, other: &Self, factor: f64) -> Self {
        *self + *other * factor
    }
}

impl<const N: usize> OdeState for [num_complex::Complex64; N] {
    fn add_scaled(&self, other: &Self, factor: f64) -> Self {
        let mut out = *self;
        for (o, x) in out.iter_mut().zip(other) {
            *o += x * factor;
        }
        out
    }
}

/// Classical fourth-order Runge-Kutta from `t0` to `t1` in `steps` equal
/// steps. `inspect` sees the state after every step and may abort.
pub fn rk4<S, F, I>(mut rhs: F, y0: S, t0: f64, t1: f64, steps: usize, mut inspect: I) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
    I: FnMut(&S) -> Result<()>,
{
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + h * i as f64;
        let k1 = rhs(t, &y)?;
        let k2 = rhs(t + 0.5 * h, &y.add_scaled(&k1, 0.5 * h))?;
        let k3 = rhs(t + 0.5 * h, &y.add_scaled(&k2, 0.5 * h))?;
        let k4 = rhs(t + h, &y.add_scaled(&k3, h))?;
        y = y
            .add_scaled(&k1, h / 6.0)
            .add_scaled(&k2, h / 3.0)
            .add_scaled(&k3, h / 3.0)
            .add_scaled(&k4, h / 6.0);
        inspect(&y)?;
    }
    Ok(y)
}

/// Integrates dρ/dt = rule(t, ρ) from 0 to `tau` with RK4.
///
/// Fails if an intermediate state loses positivity by more than 1e-8, or if
/// the result drifts from unit trace or Hermiticity by more than 1e-10.
pub fn evolve_numeric<F>(rule: F, rho0: Matrix2c, tau: f64, steps: usize) -> Result<Matrix2c>
where
    F: FnMut(f64, &Matrix2c) -> Result<Matrix2c>,
{
    if steps < 100 {
        return Err(QslError::param("steps", steps as f64, "must be >= 100"));
    }
    let check_positive = |rho: &Matrix2c| {
        let (lo, _) = rho.hermitian_eigenvalues();
        if lo < -1e-8 {
            Err(QslError::PositivityLost { min_eigenvalue: lo })
        } else {
            Ok(())
        }
    };
    let rho = rk4(rule, rho0, 0.0, tau, steps, check_positive)?;
    let trace_drift = (rho.trace() - rho0.trace()).norm();
    if trace_drift > 1e-10 {
        return Err(QslError::InvalidDensity(format!(
            "trace drifted by {trace_drift:e}"
        )));
    }
    let defect = rho.hermiticity_defect();
    if defect > 1e-10 {
        return Err(QslError::InvalidDensity(format!(
            "Hermiticity lost (defect {defect:e})"
        )));
    }
    Ok(rho)
}

/// Outcome of sampling 2cosΘ sinΘ Θ̇ tr[ρ₀²] ≤ |tr[ρ₀ L_t(ρ_t)]| along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeBoundReport {
    pub samples: usize,
    /// max over samples of LHS − RHS; ≤ 0 when the inequality holds.
    pub max_violation: f64,
    pub worst_time: f64,
    pub passed: bool,
}

pub const DERIVATIVE_BOUND_TOL: f64 = 1e-6;

pub fn derivative_bound_check<T: Trajectory + ?Sized>(
    traj: &T,
    s0: &BlochState,
    tau: f64,
    samples: usize,
) -> Result<DerivativeBoundReport> {
    if samples < 10 {
        return Err(QslError::param("samples", samples as f64, "must be >= 10"));
    }
    if !(tau > 0.0) {
        return Err(QslError::param("tau", tau, "must be > 0"));
    }
    let rho0 = bloch_to_density(s0);
    let p0 = crate::qubit::purity(s0);
    let theta_at = |t: f64| -> Result<f64> {
        let st = density_to_bloch(&traj.state_at(t)?)?;
        Ok(relative_purity(s0, &st).theta)
    };
    let delta = tau * 1e-6;
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst_time = 0.0;
    for i in 1..=samples {
        let t = tau * i as f64 / samples as f64;
        let theta = theta_at(t)?;
        let theta_dot = (theta_at(t + delta)? - theta_at(t - delta)?) / (2.0 * delta);
        let lhs = (2.0 * theta).sin() * theta_dot * p0;
        let rhs = rho0.trace_product(&traj.generator_at(t)?).norm();
        let v = lhs - rhs;
        if v > max_violation {
            max_violation = v;
            worst_time = t;
        }
    }
    Ok(DerivativeBoundReport {
        samples,
        max_violation,
        worst_time,
        passed: max_violation <= DERIVATIVE_BOUND_TOL,
    })
}
