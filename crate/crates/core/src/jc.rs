//! Damped Jaynes-Cummings qubit coupled resonantly to a Lorentzian reservoir.
//!
//! The reduced dynamics is fixed by the real amplitude q_t, which solves
//! q̈ + λq̇ + (γ₀λ/2)q = 0 with q(0) = 1, q̇(0) = 0. Populations of the excited
//! level scale with q², coherences with q. All QSL quantities are built from
//! q and q̇ directly; the decay rate γ_t = −2q̇/q is only exposed for
//! inspection because it diverges at the zeros of q in the strong-coupling
//! regime.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{generic_qsl, rk4, ModelQsl, QslResult, Trajectory};
use crate::error::{QslError, Result};
use crate::quadrature::{integrate_scalar, QuadratureConfig};
use crate::qubit::{bloch_to_density, coherence_l1, BlochState, Matrix2c};

/// Relative width |λ² − 2γ₀λ|/λ² below which the critical branch is used.
pub const CRITICAL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JcParams {
    /// Qubit frequency. Sets the unit; does not enter the reduced dynamics.
    pub omega0: f64,
    /// Spectral width of the reservoir.
    pub lambda: f64,
    /// System-reservoir coupling strength.
    pub gamma0: f64,
}

impl JcParams {
    pub fn new(lambda: f64, gamma0: f64) -> Result<Self> {
        Self::with_omega0(1.0, lambda, gamma0)
    }

    pub fn with_omega0(omega0: f64, lambda: f64, gamma0: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(QslError::param("lambda", lambda, "must be finite and > 0"));
        }
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(QslError::param("gamma0", gamma0, "must be finite and > 0"));
        }
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(QslError::param("omega0", omega0, "must be finite and > 0"));
        }
        Ok(Self {
            omega0,
            lambda,
            gamma0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchKind {
    /// 2γ₀ > λ: q oscillates with frequency Ω/2.
    Underdamped,
    /// 2γ₀ < λ: q decays monotonically.
    Overdamped,
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JcBranch {
    pub kind: BranchKind,
    /// |h| = √(λ² − 2γ₀λ) when overdamped, Ω = √(2γ₀λ − λ²) when
    /// underdamped, 0 at criticality.
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Markovian,
    NonMarkovian,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Markovian => "markovian",
            Regime::NonMarkovian => "non-markovian",
        }
    }
}

pub fn jc_branch(p: &JcParams) -> JcBranch {
    let disc = p.lambda * p.lambda - 2.0 * p.gamma0 * p.lambda;
    if disc.abs() / (p.lambda * p.lambda) < CRITICAL_EPS {
        JcBranch {
            kind: BranchKind::Critical,
            magnitude: 0.0,
        }
    } else if disc > 0.0 {
        JcBranch {
            kind: BranchKind::Overdamped,
            magnitude: disc.sqrt(),
        }
    } else {
        JcBranch {
            kind: BranchKind::Underdamped,
            magnitude: (-disc).sqrt(),
        }
    }
}

/// Markovian iff γ₀ < λ/2; the boundary itself counts as non-Markovian.
pub fn jc_regime(p: &JcParams) -> Regime {
    if p.gamma0 < 0.5 * p.lambda {
        Regime::Markovian
    } else {
        Regime::NonMarkovian
    }
}

/// e^{−λt/2}·cosh(ht/2) and e^{−λt/2}·sinh(ht/2) without overflow.
fn damped_hyperbolic(lambda: f64, h: f64, t: f64) -> (f64, f64) {
    let x = 0.5 * h * t;
    if x < 20.0 {
        let e = (-0.5 * lambda * t).exp();
        (e * x.cosh(), e * x.sinh())
    } else {
        let slow = (0.5 * (h - lambda) * t).exp();
        let fast = (-0.5 * (h + lambda) * t).exp();
        (0.5 * (slow + fast), 0.5 * (slow - fast))
    }
}

/// Amplitude damping factor q_t.
pub fn q_of_t(p: &JcParams, t: f64) -> f64 {
    let l = p.lambda;
    let b = jc_branch(p);
    match b.kind {
        BranchKind::Overdamped => {
            let (c, s) = damped_hyperbolic(l, b.magnitude, t);
            c + l / b.magnitude * s
        }
        BranchKind::Underdamped => {
            let x = 0.5 * b.magnitude * t;
            (-0.5 * l * t).exp() * (x.cos() + l / b.magnitude * x.sin())
        }
        BranchKind::Critical => (-0.5 * l * t).exp() * (1.0 + 0.5 * l * t),
    }
}

/// dq_t/dt in closed form.
pub fn dq_dt(p: &JcParams, t: f64) -> f64 {
    let l = p.lambda;
    let b = jc_branch(p);
    let k = p.gamma0 * l;
    match b.kind {
        BranchKind::Overdamped => {
            let (_, s) = damped_hyperbolic(l, b.magnitude, t);
            -k / b.magnitude * s
        }
        BranchKind::Underdamped => {
            -k / b.magnitude * (-0.5 * l * t).exp() * (0.5 * b.magnitude * t).sin()
        }
        BranchKind::Critical => -k * 0.5 * t * (-0.5 * l * t).exp(),
    }
}

/// Time-dependent decay rate γ_t = −2q̇_t/q_t.
///
/// Evaluated from the ratio form so that it stays finite for large t in the
/// overdamped branch. Reports a pole where q_t vanishes.
pub fn jc_gamma_t(p: &JcParams, t: f64) -> Result<f64> {
    let l = p.lambda;
    let k = 2.0 * p.gamma0 * l;
    let b = jc_branch(p);
    match b.kind {
        BranchKind::Overdamped => {
            let th = (0.5 * b.magnitude * t).tanh();
            Ok(k * th / (b.magnitude + l * th))
        }
        BranchKind::Underdamped => {
            let x = 0.5 * b.magnitude * t;
            // q_t · e^{λt/2}; its zeros are the poles of γ_t
            let den = x.cos() + l / b.magnitude * x.sin();
            if den.abs() < 1e-12 {
                return Err(QslError::Pole {
                    what: "decay rate gamma_t (q_t = 0)",
                    at: t,
                });
            }
            Ok(k / b.magnitude * x.sin() / den)
        }
        BranchKind::Critical => Ok(p.gamma0 * l * t / (1.0 + 0.5 * l * t)),
    }
}

/// Zeros of q̇ and q in `(0, tau)`; only the underdamped branch has any.
pub fn jc_kink_times(p: &JcParams, tau: f64) -> Vec<f64> {
    let b = jc_branch(p);
    if b.kind != BranchKind::Underdamped {
        return Vec::new();
    }
    let w = b.magnitude;
    let mut out = Vec::new();
    let shift = (w / p.lambda).atan();
    for k in 1.. {
        let t_dq = 2.0 * PI * k as f64 / w;
        let t_q = 2.0 * (PI * k as f64 - shift) / w;
        if t_q >= tau {
            break;
        }
        out.push(t_q);
        if t_dq < tau {
            out.push(t_dq);
        }
    }
    out
}

/// Times in `(0, tau)` where q_t = 0 and γ_t has a pole.
pub fn jc_pole_times(p: &JcParams, tau: f64) -> Vec<f64> {
    let b = jc_branch(p);
    if b.kind != BranchKind::Underdamped {
        return Vec::new();
    }
    let shift = (b.magnitude / p.lambda).atan();
    (1..)
        .map(|k| 2.0 * (PI * k as f64 - shift) / b.magnitude)
        .take_while(|&t| t < tau)
        .collect()
}

/// ρ_t = ½[[(1+rz)q², (rx−i·ry)q], [(rx+i·ry)q, 2−(1+rz)q²]].
pub fn jc_state_at(p: &JcParams, s0: &BlochState, t: f64) -> Matrix2c {
    let q = q_of_t(p, t);
    let up = 0.5 * (1.0 + s0.rz()) * q * q;
    let down = 0.5 * (1.0 - s0.rz()) + 0.5 * (1.0 + s0.rz()) * (1.0 - q) * (1.0 + q);
    let c = 0.5 * q * Complex64::new(s0.rx(), -s0.ry());
    Matrix2c::new(up.into(), c, c.conj(), down.into())
}

/// L_t(ρ_t) as the time derivative of [`jc_state_at`], which keeps it
/// finite where γ_t has poles.
pub fn jc_generator_at(p: &JcParams, s0: &BlochState, t: f64) -> Matrix2c {
    let q = q_of_t(p, t);
    let dq = dq_dt(p, t);
    let d_up = (1.0 + s0.rz()) * q * dq;
    let c = 0.5 * dq * Complex64::new(s0.rx(), -s0.ry());
    Matrix2c::new(d_up.into(), c, c.conj(), (-d_up).into())
}

/// Right-hand side (γ_t/2)(2σ₋ρσ₊ − σ₊σ₋ρ − ρσ₊σ₋) with the given rate.
pub fn jc_dissipator(gamma_t: f64, rho: &Matrix2c) -> Matrix2c {
    let sp = Matrix2c::sigma_plus();
    let sm = Matrix2c::sigma_minus();
    let n = sp * sm;
    (sm * *rho * sp * 2.0 - n * *rho - *rho * n) * (0.5 * gamma_t)
}

/// The Lindblad right-hand side of the model as a function of (t, ρ), using
/// the closed-form decay rate. Fails at poles of γ_t.
pub fn jc_lindblad_rule(p: JcParams) -> impl FnMut(f64, &Matrix2c) -> Result<Matrix2c> {
    move |t, rho| Ok(jc_dissipator(jc_gamma_t(&p, t)?, rho))
}

/// Qubit state at time `t` from an RK4 propagation of the qubit plus one
/// damped bosonic mode that reproduces the Lorentzian memory kernel.
///
/// The enlarged system (basis |e,0⟩, |g,0⟩, |g,1⟩) has the time-independent
/// Lindblad equation ρ̇ = −i[H, ρ] + 2λ(aρa† − ½{a†a, ρ}) with
/// H = √(γ₀λ/2)(σ₊a + σ₋a†). Tracing out the mode yields the exact reduced
/// dynamics without ever forming γ_t.
pub fn jc_state_pseudomode(p: &JcParams, s0: &BlochState, t: f64, steps: usize) -> Result<Matrix2c> {
    if steps == 0 {
        return Err(QslError::param("steps", 0.0, "must be > 0"));
    }
    type M3 = [Complex64; 9];
    let g = (0.5 * p.gamma0 * p.lambda).sqrt();
    let kappa = 2.0 * p.lambda;
    let rho0 = bloch_to_density(s0);
    let mut y: M3 = [Complex64::default(); 9];
    y[0] = rho0.a11;
    y[1] = rho0.a12;
    y[3] = rho0.a21;
    y[4] = rho0.a22;
    let i = Complex64::i();
    let rhs = |_t: f64, r: &M3| -> Result<M3> {
        let at = |a: usize, b: usize| r[3 * a + b];
        let mut out: M3 = [Complex64::default(); 9];
        for a in 0..3 {
            for b in 0..3 {
                // H couples index 0 (e,0) and 2 (g,1)
                let h_rho = match a {
                    0 => g * at(2, b),
                    2 => g * at(0, b),
                    _ => Complex64::default(),
                };
                let rho_h = match b {
                    0 => g * at(a, 2),
                    2 => g * at(a, 0),
                    _ => Complex64::default(),
                };
                let mut v = -i * (h_rho - rho_h);
                // a = |g,0⟩⟨g,1| maps index 2 to index 1
                if a == 1 && b == 1 {
                    v += kappa * at(2, 2);
                }
                let n_a = if a == 2 { 1.0 } else { 0.0 };
                let n_b = if b == 2 { 1.0 } else { 0.0 };
                v -= 0.5 * kappa * (n_a + n_b) * at(a, b);
                out[3 * a + b] = v;
            }
        }
        Ok(out)
    };
    let y = rk4(rhs, y, 0.0, t, steps, |_| Ok(()))?;
    Ok(Matrix2c::new(y[0], y[1], y[3], y[4] + y[8]))
}

/// Step count that keeps the pseudomode RK4 propagation well inside its
/// stability region with global error far below 1e-8.
pub fn pseudomode_steps(p: &JcParams, t: f64) -> usize {
    let rate = 2.0 * p.lambda + (0.5 * p.gamma0 * p.lambda).sqrt();
    ((t * rate * 400.0).ceil() as usize).max(1000)
}

pub struct JcTrajectory {
    pub params: JcParams,
    pub s0: BlochState,
}

impl Trajectory for JcTrajectory {
    fn state_at(&self, t: f64) -> Result<Matrix2c> {
        Ok(jc_state_at(&self.params, &self.s0, t))
    }

    fn generator_at(&self, t: f64) -> Result<Matrix2c> {
        Ok(jc_generator_at(&self.params, &self.s0, t))
    }

    fn breakpoints(&self, tau: f64) -> Vec<f64> {
        jc_kink_times(&self.params, tau)
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(QslError::param("tau", tau, "must be finite and >= 0"));
    }
    Ok(())
}

/// Closed-form operator-norm bound
/// (1−q_τ)[C² + rz(1+rz)(1+q_τ)] / ((1/τ)∫₀^τ |q̇_t √(C² + 4q_t²(1+rz)²)| dt),
/// together with the generic three-norm evaluation over [`JcTrajectory`].
///
/// A negative numerator means the evolved state overlaps ρ₀ more than ρ₀
/// itself; the bound is then 0 and the result is flagged as clamped.
pub fn jc_qsl(p: &JcParams, s0: &BlochState, tau: f64, quad: &QuadratureConfig) -> Result<ModelQsl> {
    check_tau(tau)?;
    quad.validate()?;
    if tau == 0.0 {
        return Ok(ModelQsl {
            closed_form: 0.0,
            result: QslResult {
                purity0: crate::qubit::purity(s0),
                degenerate: true,
                ..Default::default()
            },
        });
    }
    let c2 = coherence_l1(s0).powi(2);
    let rz = s0.rz();
    let q_tau = q_of_t(p, tau);
    let numerator = (1.0 - q_tau) * (c2 + rz * (1.0 + rz) * (1.0 + q_tau));
    let kinks = jc_kink_times(p, tau);
    let integral = integrate_scalar(
        |t| {
            let q = q_of_t(p, t);
            let w = 2.0 * q * (1.0 + rz);
            Ok((dq_dt(p, t) * (c2 + w * w).sqrt()).abs())
        },
        0.0,
        tau,
        &kinks,
        quad,
    )?;
    let denominator = integral / tau;
    let closed_form = if denominator > 0.0 {
        numerator.max(0.0) / denominator
    } else {
        0.0
    };

    let traj = JcTrajectory {
        params: *p,
        s0: *s0,
    };
    let mut result = generic_qsl(&traj, s0, tau, quad)?;
    result.clamped |= numerator < 0.0;
    result.degenerate |= denominator == 0.0;
    Ok(ModelQsl {
        closed_form,
        result,
    })
}

/// Pure-state form |α|(1−q_τ)[1−(1−2α²)q_τ] / ((1/τ)∫|q̇_t √(1−(1−4q_t²)α²)| dt)
/// for |ψ⟩ = α e^{iθ}|1⟩ + √(1−α²)|0⟩, with default quadrature settings.
pub fn jc_qsl_pure(p: &JcParams, alpha: f64, tau: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(QslError::param("alpha", alpha, "must lie in [0, 1]"));
    }
    check_tau(tau)?;
    if alpha == 0.0 || tau == 0.0 {
        return Ok(0.0);
    }
    let quad = QuadratureConfig::default();
    let a2 = alpha * alpha;
    let q_tau = q_of_t(p, tau);
    let numerator = alpha * (1.0 - q_tau) * (1.0 - (1.0 - 2.0 * a2) * q_tau);
    let integral = integrate_scalar(
        |t| {
            let q = q_of_t(p, t);
            Ok((dq_dt(p, t) * (1.0 - (1.0 - 4.0 * q * q) * a2).sqrt()).abs())
        },
        0.0,
        tau,
        &jc_kink_times(p, tau),
        &quad,
    )?;
    let denominator = integral / tau;
    Ok(if denominator > 0.0 {
        numerator / denominator
    } else {
        0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::evolve_numeric;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params(l: f64, g: f64) -> JcParams {
        JcParams::new(l, g).unwrap()
    }

    fn st(x: f64, y: f64, z: f64) -> BlochState {
        BlochState::new(x, y, z).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(JcParams::new(0.0, 1.0).is_err());
        assert!(JcParams::new(15.0, -1.0).is_err());
        assert!(JcParams::new(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn branch_examples() {
        let b = jc_branch(&params(15.0, 5.0));
        assert_eq!(b.kind, BranchKind::Overdamped);
        assert_relative_eq!(b.magnitude, 75f64.sqrt(), max_relative = 1e-15);
        let b = jc_branch(&params(15.0, 7.5));
        assert_eq!(b.kind, BranchKind::Critical);
        assert_eq!(b.magnitude, 0.0);
        let b = jc_branch(&params(15.0, 40.0));
        assert_eq!(b.kind, BranchKind::Underdamped);
        assert_relative_eq!(b.magnitude, 975f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn regime_examples() {
        assert_eq!(jc_regime(&params(15.0, 5.0)), Regime::Markovian);
        assert_eq!(jc_regime(&params(15.0, 7.5)), Regime::NonMarkovian);
        assert_eq!(jc_regime(&params(15.0, 40.0)), Regime::NonMarkovian);
    }

    #[test]
    fn q_starts_at_one() {
        for g in [1.0, 7.5, 40.0] {
            assert_eq!(q_of_t(&params(15.0, g), 0.0), 1.0);
            assert_eq!(dq_dt(&params(15.0, g), 0.0), 0.0);
            assert_eq!(jc_gamma_t(&params(15.0, g), 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn markov_limit() {
        let p = params(1e4, 1.0);
        assert_abs_diff_eq!(q_of_t(&p, 1.0), (-0.5f64).exp(), epsilon = 1e-3);
        assert_abs_diff_eq!(jc_gamma_t(&p, 1.0).unwrap(), 1.0, epsilon = 1e-3);
    }

    #[test]
    fn overdamped_is_finite_at_long_times() {
        let p = params(15.0, 1.0);
        let q = q_of_t(&p, 500.0);
        assert!(q.is_finite() && q > 0.0 && q < 1e-10);
        assert!(dq_dt(&p, 500.0).is_finite());
        assert!(jc_gamma_t(&p, 500.0).unwrap().is_finite());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let d = 1e-6;
        for (l, g) in [(15.0, 5.0), (15.0, 7.5), (15.0, 40.0), (15.0, 7.5 + 1e-3)] {
            let p = params(l, g);
            for t in [0.1, 0.37, 1.0, 2.5] {
                let fd = (q_of_t(&p, t + d) - q_of_t(&p, t - d)) / (2.0 * d);
                let an = dq_dt(&p, t);
                assert_abs_diff_eq!(an, fd, epsilon = 1e-8 * an.abs().max(1.0));
            }
        }
    }

    #[test]
    fn gamma_t_is_minus_two_dq_over_q() {
        let p = params(15.0, 5.0);
        let t = 1.0;
        let expected = -2.0 * dq_dt(&p, t) / q_of_t(&p, t);
        assert_relative_eq!(jc_gamma_t(&p, t).unwrap(), expected, max_relative = 1e-12);
        let p = params(15.0, 40.0);
        let t = 0.05;
        let expected = -2.0 * dq_dt(&p, t) / q_of_t(&p, t);
        assert_relative_eq!(jc_gamma_t(&p, t).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn gamma_t_reports_pole() {
        let p = params(15.0, 40.0);
        let t0 = jc_pole_times(&p, 1.0)[0];
        assert!(q_of_t(&p, t0).abs() < 1e-12);
        assert!(matches!(jc_gamma_t(&p, t0), Err(QslError::Pole { .. })));
    }

    #[test]
    fn dq_extremum_at_first_zero_of_q_neighbourhood() {
        // q̇ vanishes at t = 2π/Ω where q has a local minimum; q̇ changes sign smoothly
        let p = params(15.0, 40.0);
        let w = jc_branch(&p).magnitude;
        let t1 = 2.0 * PI / w;
        assert_abs_diff_eq!(dq_dt(&p, t1), 0.0, epsilon = 1e-12);
        assert!(dq_dt(&p, t1 - 1e-3) < 0.0 && dq_dt(&p, t1 + 1e-3) > 0.0);
    }

    #[test]
    fn state_examples() {
        let p = params(15.0, 40.0);
        let s0 = st(0.6, 0.0, 0.6);
        assert_eq!(jc_state_at(&p, &s0, 0.0), bloch_to_density(&s0));
        let g = BlochState::ground();
        for t in [0.0, 0.3, 2.0] {
            assert_eq!(jc_state_at(&p, &g, t), Matrix2c::diag(0.0, 1.0));
            assert_eq!(jc_generator_at(&p, &g, t), Matrix2c::zero());
        }
        assert_eq!(
            jc_generator_at(&params(15.0, 5.0), &BlochState::excited(), 0.0),
            Matrix2c::zero()
        );
    }

    #[test]
    fn state_matches_pseudomode_oracle() {
        let p = params(15.0, 40.0);
        let s0 = st(0.6, 0.0, 0.0);
        let oracle = jc_state_pseudomode(&p, &s0, 1.0, pseudomode_steps(&p, 1.0)).unwrap();
        assert!(jc_state_at(&p, &s0, 1.0).max_abs_diff(&oracle) < 1e-8);
    }

    #[test]
    fn state_matches_lindblad_oracle_without_poles() {
        let p = params(15.0, 5.0);
        let s0 = st(0.6, 0.0, 0.0);
        let rho = evolve_numeric(jc_lindblad_rule(p), bloch_to_density(&s0), 1.0, 10_000).unwrap();
        assert!(jc_state_at(&p, &s0, 1.0).max_abs_diff(&rho) < 1e-8);
    }

    #[test]
    fn generator_matches_state_derivative() {
        let p = params(15.0, 40.0);
        let s0 = st(0.6, 0.0, 0.6);
        let (t, d) = (0.5, 1e-6);
        let fd = (jc_state_at(&p, &s0, t + d) - jc_state_at(&p, &s0, t - d)) * (0.5 / d);
        assert!(jc_generator_at(&p, &s0, t).max_abs_diff(&fd) < 1e-7);
    }

    #[test]
    fn generator_equals_dissipator_away_from_poles() {
        let p = params(15.0, 5.0);
        let s0 = st(0.3, -0.4, 0.2);
        let t = 0.7;
        let lindblad = jc_dissipator(jc_gamma_t(&p, t).unwrap(), &jc_state_at(&p, &s0, t));
        assert!(jc_generator_at(&p, &s0, t).max_abs_diff(&lindblad) < 1e-14);
    }

    #[test]
    fn ground_state_bound_is_degenerate_zero() {
        let r = jc_qsl(&params(15.0, 5.0), &BlochState::ground(), 1.0, &QuadratureConfig::default())
            .unwrap();
        assert_eq!(r.closed_form, 0.0);
        assert_eq!(r.result.tau_qsl_unified, 0.0);
        assert!(r.result.degenerate);
    }

    #[test]
    fn closed_form_matches_generic_pipeline() {
        let quad = QuadratureConfig::default();
        for (g, s0) in [(40.0, st(0.6, 0.0, 0.6)), (5.0, st(0.0, 0.0, 0.6)), (20.0, st(0.1, 0.5, -0.2))] {
            let r = jc_qsl(&params(15.0, g), &s0, 1.0, &quad).unwrap();
            assert_relative_eq!(r.closed_form, r.result.tau_qsl_op, max_relative = 1e-6);
            assert!(r.result.tau_qsl_unified <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn golden_values() {
        // frozen from a 30-digit tanh-sinh evaluation of the closed form,
        // with q̇ obtained by numerical differentiation of q
        let quad = QuadratureConfig::default();
        let fig2 = jc_qsl(&params(15.0, 40.0), &st(0.6, 0.0, 0.6), 1.0, &quad).unwrap();
        assert_relative_eq!(fig2.closed_form, 0.612_649_806_126_125_57, max_relative = 1e-9);
        assert_relative_eq!(fig2.result.tau_qsl_op, fig2.closed_form, max_relative = 1e-6);

        // C = 0 with monotone q: the bound collapses to rz·τ
        let weak = jc_qsl(&params(15.0, 5.0), &st(0.0, 0.0, 0.6), 1.0, &quad).unwrap();
        assert_relative_eq!(weak.closed_form, 0.6, max_relative = 1e-9);
        let strong = jc_qsl(&params(15.0, 40.0), &st(0.0, 0.0, 0.6), 1.0, &quad).unwrap();
        assert_relative_eq!(strong.closed_form, 0.544_075_236_227_195_82, max_relative = 1e-9);
        assert!(weak.closed_form > strong.closed_form);
    }

    #[test]
    fn pure_state_reduction() {
        let p = params(15.0, 40.0);
        let quad = QuadratureConfig::default();
        assert_eq!(jc_qsl_pure(&p, 0.0, 1.0).unwrap(), 0.0);
        let full = jc_qsl(&p, &BlochState::excited(), 1.0, &quad).unwrap();
        assert_relative_eq!(jc_qsl_pure(&p, 1.0, 1.0).unwrap(), full.closed_form, max_relative = 1e-10);
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let c = (4.0 * a * a * (1.0 - a * a)).sqrt();
        let s0 = BlochState::new(c.min(1.0), 0.0, 2.0 * a * a - 1.0).unwrap();
        let full = jc_qsl(&p, &s0, 1.0, &quad).unwrap();
        assert_relative_eq!(jc_qsl_pure(&p, a, 1.0).unwrap(), full.closed_form, max_relative = 1e-10);
        assert!(jc_qsl_pure(&p, 1.2, 1.0).is_err());
    }

    #[test]
    fn zero_driving_time_is_degenerate() {
        let r = jc_qsl(&params(15.0, 40.0), &st(0.6, 0.0, 0.6), 0.0, &QuadratureConfig::default())
            .unwrap();
        assert!(r.result.degenerate);
        assert_eq!(r.result.tau_qsl_unified, 0.0);
    }
}
