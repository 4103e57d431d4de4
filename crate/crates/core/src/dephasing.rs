//! Pure-dephasing qubit coupled to an Ohmic-family bath with soft cutoff,
//! J(ω) = η ω^s ω_c^{1−s} e^{−ω/ω_c}.
//!
//! Populations are frozen; coherences decay as e^{−Γ_t}. At zero temperature
//! Γ_t and its rate γ_t = dΓ_t/dt have closed forms; at finite temperature Γ_t
//! is evaluated by quadrature and γ_t by central differences.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{generic_qsl, ModelQsl, QslResult, Trajectory};
use crate::error::{QslError, Result};
use crate::quadrature::{integrate_scalar, simpson, QuadratureConfig};
use crate::qubit::{coherence_l1, BlochState, Matrix2c};
use crate::special::gamma_function;

/// Smallest ohmicity accepted; below it Γ(s−1) approaches its pole at −1.
pub const MIN_OHMICITY: f64 = 0.05;

/// Half-width of the window around s = 1 where the Ohmic limit is used.
pub const OHMIC_SEAM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingParams {
    /// Dimensionless coupling η.
    pub eta: f64,
    /// Ohmicity exponent s (sub-Ohmic < 1 < super-Ohmic).
    pub s: f64,
    /// Cutoff frequency; the natural unit.
    pub omega_c: f64,
    /// k_B·T in the same units as ω_c; 0 selects the closed forms.
    pub temperature: f64,
}

impl DephasingParams {
    pub fn new(eta: f64, s: f64) -> Result<Self> {
        Self::with_bath(eta, s, 1.0, 0.0)
    }

    pub fn with_bath(eta: f64, s: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(QslError::param("eta", eta, "must be finite and > 0"));
        }
        if !(s >= MIN_OHMICITY && s.is_finite()) {
            return Err(QslError::param("s", s, "must be finite and >= 0.05"));
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(QslError::param("omega_c", omega_c, "must be finite and > 0"));
        }
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(QslError::param("temperature", temperature, "must be finite and >= 0"));
        }
        Ok(Self {
            eta,
            s,
            omega_c,
            temperature,
        })
    }

    fn require_zero_temperature(&self) -> Result<()> {
        if self.temperature != 0.0 {
            return Err(QslError::param(
                "temperature",
                self.temperature,
                "closed form requires zero temperature",
            ));
        }
        Ok(())
    }
}

pub fn spectral_density(p: &DephasingParams, omega: f64) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    let u = omega / p.omega_c;
    p.eta * p.omega_c * u.powf(p.s) * (-u).exp()
}

/// Γ_τ = η[1 − cos((s−1)·atan x)/(1+x²)^{(s−1)/2}]·Γ(s−1) with x = ω_c τ,
/// and (η/2)·ln(1+x²) within [`OHMIC_SEAM`] of s = 1.
pub fn big_gamma_analytic(p: &DephasingParams, tau: f64) -> Result<f64> {
    p.require_zero_temperature()?;
    if !(tau >= 0.0) {
        return Err(QslError::param("tau", tau, "must be >= 0"));
    }
    let x = p.omega_c * tau;
    let log_term = x.mul_add(x, 0.0).ln_1p();
    let a = p.s - 1.0;
    if a.abs() < OHMIC_SEAM {
        return Ok(0.5 * p.eta * log_term);
    }
    let angle = a * x.atan();
    // 1 − cos(aθ)e^{−aL/2}, rearranged to avoid cancellation for small a
    let half = (0.5 * angle).sin();
    let bracket = -(-0.5 * a * log_term).exp_m1() * angle.cos() + 2.0 * half * half;
    Ok(p.eta * bracket * gamma_function(a)?)
}

/// γ_t = η ω_c (1+x²)^{−s/2} Γ(s) sin(s·atan x) with x = ω_c t.
pub fn dephasing_gamma_t(p: &DephasingParams, t: f64) -> Result<f64> {
    p.require_zero_temperature()?;
    let x = p.omega_c * t;
    Ok(p.eta * p.omega_c * (-0.5 * p.s * x.mul_add(x, 0.0).ln_1p()).exp()
        * gamma_function(p.s)?
        * (p.s * x.atan()).sin())
}

/// Times in `(0, tau)` where the zero-temperature rate γ_t changes sign.
pub fn gamma_sign_changes(p: &DephasingParams, tau: f64) -> Vec<f64> {
    (1..)
        .map(|k| k as f64 * PI / p.s)
        .take_while(|&angle| angle < 0.5 * PI)
        .map(|angle| angle.tan() / p.omega_c)
        .filter(|&t| t > 0.0 && t < tau)
        .collect()
}

/// Intervals within `[0, tau]` where γ_t < 0 at zero temperature. Such
/// intervals signal coherence backflow; they are reported, not rejected.
pub fn negative_rate_intervals(p: &DephasingParams, tau: f64) -> Vec<(f64, f64)> {
    let mut edges = vec![0.0];
    edges.extend(gamma_sign_changes(p, tau));
    edges.push(tau);
    edges
        .windows(2)
        .enumerate()
        .filter(|(k, _)| k % 2 == 1)
        .map(|(_, w)| (w[0], w[1]))
        .collect()
}

/// Γ_τ = ∫₀^∞ dω J(ω) coth(ω/2T)(1 − cos ωτ)/ω² by quadrature.
///
/// In u = ω/ω_c the integrand is η u^{s−2} e^{−u} (1 − cos(ω_c τ u)) coth(…).
/// The substitution u = v^m with m chosen from s makes the integrand vanish
/// smoothly at the origin; the range ends at U with η U^s e^{−U} < 1e-12.
pub fn big_gamma_numeric(p: &DephasingParams, tau: f64) -> Result<f64> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(QslError::param("tau", tau, "must be finite and >= 0"));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let x = p.omega_c * tau;
    let thermal = p.temperature > 0.0;
    let beta_half = if thermal {
        p.omega_c / (2.0 * p.temperature)
    } else {
        0.0
    };

    let mut upper = p.s.max(1.0) + 1.0;
    let tail = |u: f64| {
        let coth_bound = if thermal { 1.0 + 1.0 / (beta_half * u) } else { 1.0 };
        p.eta * u.powf(p.s) * (-u).exp() * coth_bound
    };
    while tail(upper) >= 1e-12 {
        upper += 1.0;
        if upper > 1e4 {
            return Err(QslError::NonConvergence {
                what: "dephasing integral tail",
                achieved: tail(upper),
                target: 1e-12,
            });
        }
    }

    // leading small-u power of the integrand: s at T = 0, s − 1 at T > 0
    let lead = if thermal { p.s - 1.0 } else { p.s };
    let m = ((4.0 / (lead + 1.0)).ceil() as i32).clamp(1, 80);
    let v_max = upper.powf(1.0 / m as f64);

    let integrand = |v: f64| -> Result<[f64; 1]> {
        if v <= 0.0 {
            return Ok([0.0]);
        }
        let u = v.powi(m);
        let du = m as f64 * v.powi(m - 1);
        let half = (0.5 * x * u).sin();
        let one_minus_cos = 2.0 * half * half;
        let coth = if thermal {
            let y = beta_half * u;
            if y < 1e-4 {
                1.0 / y + y / 3.0
            } else {
                1.0 / y.tanh()
            }
        } else {
            1.0
        };
        Ok([p.eta * u.powf(p.s - 2.0) * (-u).exp() * one_minus_cos * coth * du])
    };

    // enough nodes to resolve the oscillation of cos(xu) on [0, U]
    let periods = x * upper / (2.0 * PI);
    let wanted = (4001.0f64).max(40.0 * m as f64 * periods).min(4.0e6) as usize;
    let mut nodes = wanted | 1;
    let mut integrand = integrand;
    let mut coarse = simpson(&mut integrand, 0.0, v_max, nodes)?[0];
    let mut worst = f64::INFINITY;
    for _ in 0..6 {
        nodes = 2 * nodes - 1;
        let fine = simpson(&mut integrand, 0.0, v_max, nodes)?[0];
        worst = if fine == coarse { 0.0 } else { (fine - coarse).abs() / fine.abs() };
        if worst <= 1e-11 {
            return Ok(fine + (fine - coarse) / 15.0);
        }
        coarse = fine;
    }
    Err(QslError::NonConvergence {
        what: "dephasing integral",
        achieved: worst,
        target: 1e-11,
    })
}

/// Γ_t at any temperature: the closed form at T = 0, quadrature otherwise.
pub fn big_gamma(p: &DephasingParams, t: f64) -> Result<f64> {
    if p.temperature == 0.0 {
        big_gamma_analytic(p, t)
    } else {
        big_gamma_numeric(p, t)
    }
}

/// γ_t at any temperature. At T > 0 this is a central difference of the
/// numerical Γ_t with step 1e-5·t (one-sided near t = 0).
pub fn rate(p: &DephasingParams, t: f64) -> Result<f64> {
    if p.temperature == 0.0 {
        return dephasing_gamma_t(p, t);
    }
    let d = 1e-5 * t.max(1e-3);
    if t > d {
        Ok((big_gamma_numeric(p, t + d)? - big_gamma_numeric(p, t - d)?) / (2.0 * d))
    } else {
        Ok((big_gamma_numeric(p, t + d)? - big_gamma_numeric(p, t)?) / d)
    }
}

pub fn dephasing_state_at(p: &DephasingParams, s0: &BlochState, t: f64) -> Result<Matrix2c> {
    let decay = (-big_gamma(p, t)?).exp();
    let c = 0.5 * decay * Complex64::new(s0.rx(), -s0.ry());
    Ok(Matrix2c::new(
        (0.5 * (1.0 + s0.rz())).into(),
        c,
        c.conj(),
        (0.5 * (1.0 - s0.rz())).into(),
    ))
}

/// (γ_t/2)(σ_z ρ_t σ_z − ρ_t) evaluated on the closed-form state.
pub fn dephasing_generator_at(p: &DephasingParams, s0: &BlochState, t: f64) -> Result<Matrix2c> {
    let rho = dephasing_state_at(p, s0, t)?;
    Ok(dephasing_dissipator(rate(p, t)?, &rho))
}

pub fn dephasing_dissipator(gamma_t: f64, rho: &Matrix2c) -> Matrix2c {
    let z = Matrix2c::pauli_z();
    (z * *rho * z - *rho) * (0.5 * gamma_t)
}

/// The Lindblad right-hand side of the model as a function of (t, ρ).
pub fn dephasing_lindblad_rule(p: DephasingParams) -> impl FnMut(f64, &Matrix2c) -> Result<Matrix2c> {
    move |t, rho| Ok(dephasing_dissipator(rate(&p, t)?, rho))
}

pub struct DephasingTrajectory {
    pub params: DephasingParams,
    pub s0: BlochState,
}

impl Trajectory for DephasingTrajectory {
    fn state_at(&self, t: f64) -> Result<Matrix2c> {
        dephasing_state_at(&self.params, &self.s0, t)
    }

    fn generator_at(&self, t: f64) -> Result<Matrix2c> {
        dephasing_generator_at(&self.params, &self.s0, t)
    }

    fn breakpoints(&self, tau: f64) -> Vec<f64> {
        if self.params.temperature == 0.0 {
            gamma_sign_changes(&self.params, tau)
        } else {
            Vec::new()
        }
    }
}

/// Closed-form operator-norm bound C(ρ₀)(1 − e^{−Γ_τ}) / ((1/τ)∫₀^τ |γ_t e^{−Γ_t}| dt)
/// next to the generic three-norm evaluation.
///
/// At T > 0 the same expressions are composed from the numerical Γ_t and
/// its finite-difference rate.
pub fn dephasing_qsl(
    p: &DephasingParams,
    s0: &BlochState,
    tau: f64,
    quad: &QuadratureConfig,
) -> Result<ModelQsl> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(QslError::param("tau", tau, "must be finite and >= 0"));
    }
    quad.validate()?;
    let c = coherence_l1(s0);
    if tau == 0.0 || c == 0.0 {
        return Ok(ModelQsl {
            closed_form: 0.0,
            result: QslResult {
                purity0: crate::qubit::purity(s0),
                degenerate: true,
                ..Default::default()
            },
        });
    }
    let closed_form = c * decay_ratio(p, tau, quad)?;
    let traj = DephasingTrajectory {
        params: *p,
        s0: *s0,
    };
    let result = generic_qsl(&traj, s0, tau, quad)?;
    Ok(ModelQsl {
        closed_form,
        result,
    })
}

/// (1 − e^{−Γ_τ}) / ((1/τ)∫₀^τ |γ_t e^{−Γ_t}| dt), the C-independent factor.
fn decay_ratio(p: &DephasingParams, tau: f64, quad: &QuadratureConfig) -> Result<f64> {
    let numerator = -(-big_gamma(p, tau)?).exp_m1();
    let breaks = if p.temperature == 0.0 {
        gamma_sign_changes(p, tau)
    } else {
        Vec::new()
    };
    let integral = integrate_scalar(
        |t| Ok((rate(p, t)? * (-big_gamma(p, t)?).exp()).abs()),
        0.0,
        tau,
        &breaks,
        quad,
    )?;
    let denominator = integral / tau;
    Ok(if denominator > 0.0 {
        numerator / denominator
    } else {
        0.0
    })
}

/// Pure-state form 2β√(1−β²)(1 − e^{−Γ_τ}) / ((1/τ)∫|γ_t e^{−Γ_t}| dt) with
/// default quadrature settings.
pub fn dephasing_qsl_pure(p: &DephasingParams, beta: f64, tau: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(QslError::param("beta", beta, "must lie in [0, 1]"));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(QslError::param("tau", tau, "must be finite and >= 0"));
    }
    let c = 2.0 * beta * (1.0 - beta * beta).sqrt();
    if c == 0.0 || tau == 0.0 {
        return Ok(0.0);
    }
    Ok(c * decay_ratio(p, tau, &QuadratureConfig::default())?)
}
