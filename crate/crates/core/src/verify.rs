//! Cross-checks between closed forms, numerical oracles and the generic
//! pipeline. Each check returns a [`CheckReport`] with the worst observed
//! error and the tolerance it was held to.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dephasing::{
    big_gamma_analytic, big_gamma_numeric, dephasing_gamma_t, dephasing_qsl, dephasing_qsl_pure,
    DephasingParams, DephasingTrajectory,
};
use crate::engine::{derivative_bound_check, DERIVATIVE_BOUND_TOL};
use crate::error::Result;
use crate::jc::{jc_qsl, jc_qsl_pure, jc_state_at, jc_state_pseudomode, pseudomode_steps, JcParams, JcTrajectory};
use crate::quadrature::QuadratureConfig;
use crate::qubit::{norms, BlochState, Matrix2c};
use crate::scan::Model;

pub const DEFAULT_SEED: u64 = 20_160_517;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Oracle,
    NormOrdering,
    DerivativeBound,
    BoundValidity,
    PureState,
    Factorization,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Oracle,
        Check::NormOrdering,
        Check::DerivativeBound,
        Check::BoundValidity,
        Check::PureState,
        Check::Factorization,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Oracle => "oracle",
            Check::NormOrdering => "norm-ordering",
            Check::DerivativeBound => "derivative-bound",
            Check::BoundValidity => "bound-validity",
            Check::PureState => "pure-state",
            Check::Factorization => "factorization",
        }
    }

    pub fn parse(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// Largest error observed, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub detail: String,
}

impl CheckReport {
    fn new(name: &str, worst: f64, tolerance: f64, cases: usize, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: worst <= tolerance,
            worst,
            tolerance,
            cases,
            detail,
        }
    }
}

/// Tracks the largest error and where it occurred.
#[derive(Default)]
struct Worst {
    value: f64,
    at: String,
    cases: usize,
}

impl Worst {
    fn see(&mut self, err: f64, at: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN must register as a failure
        if err > self.value || err.is_nan() {
            self.value = if err.is_nan() { f64::INFINITY } else { err };
            self.at = at();
        }
    }

    fn report(self, name: &str, tolerance: f64) -> CheckReport {
        let detail = if self.at.is_empty() {
            String::new()
        } else {
            format!("worst at {}", self.at)
        };
        CheckReport::new(name, self.value, tolerance, self.cases, detail)
    }
}

/// |a − b| / max(|a|, |b|), zero when both vanish.
pub fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub checks: Vec<Check>,
    /// Restricts model-specific checks to one model.
    pub model: Option<Model>,
    pub lambda: f64,
    pub gamma0: Option<f64>,
    pub eta: Option<f64>,
    pub s: Option<f64>,
    pub tau: Option<f64>,
    /// Random draws for the Monte Carlo checks.
    pub samples: usize,
    /// Sample times per trajectory in the derivative-bound sweep.
    pub times: usize,
    pub seed: u64,
    pub quad: QuadratureConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            checks: Check::ALL.to_vec(),
            model: None,
            lambda: 15.0,
            gamma0: None,
            eta: None,
            s: None,
            tau: None,
            samples: 10_000,
            times: 50,
            seed: DEFAULT_SEED,
            quad: QuadratureConfig::default(),
        }
    }
}

impl VerifyConfig {
    fn wants(&self, m: Model) -> bool {
        self.model.map_or(true, |x| x == m)
    }

    fn gamma0s(&self) -> Vec<f64> {
        self.gamma0.map_or(JC_GAMMA0.to_vec(), |g| vec![g])
    }

    fn taus(&self, default: &[f64]) -> Vec<f64> {
        self.tau.map_or(default.to_vec(), |t| vec![t])
    }

    fn etas(&self) -> Vec<f64> {
        self.eta.map_or(DEPHASING_ETA.to_vec(), |e| vec![e])
    }

    fn ohmicities(&self) -> Vec<f64> {
        self.s.map_or(DEPHASING_S.to_vec(), |s| vec![s])
    }
}

pub const JC_GAMMA0: [f64; 5] = [1.0, 5.0, 7.5, 20.0, 40.0];
pub const JC_TAU: [f64; 3] = [0.2, 1.0, 3.0];
pub const DEPHASING_S: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 3.0];
pub const DEPHASING_ETA: [f64; 2] = [0.5, 1.0];
pub const DEPHASING_TAU: [f64; 3] = [0.5, 1.0, 2.0];

/// Five initial states: an excited-leaning mixed state, pure and mixed
/// equatorial states, the excited state and a ground-leaning mixed state.
pub fn standard_states() -> Vec<BlochState> {
    [
        (0.6, 0.0, 0.6),
        (1.0, 0.0, 0.0),
        (0.0, 0.0, 1.0),
        (0.3, 0.4, -0.5),
        (0.0, 0.0, -0.4),
    ]
    .iter()
    .map(|&(x, y, z)| BlochState::new(x, y, z).expect("standard states are physical"))
    .collect()
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for check in &cfg.checks {
        match check {
            Check::Oracle => {
                if cfg.wants(Model::Jc) {
                    let (states, closed) =
                        jc_oracle(cfg.lambda, &cfg.gamma0s(), &cfg.taus(&JC_TAU), &cfg.quad)?;
                    out.push(states);
                    out.push(closed);
                }
                if cfg.wants(Model::Dephasing) {
                    out.extend(dephasing_oracle(
                        &cfg.etas(),
                        &cfg.ohmicities(),
                        &cfg.taus(&DEPHASING_TAU),
                        &cfg.quad,
                    )?);
                }
            }
            Check::NormOrdering => out.push(norm_ordering(cfg.samples, cfg.seed)),
            Check::DerivativeBound => {
                if cfg.wants(Model::Jc) {
                    out.push(jc_derivative_bound(cfg.lambda, &cfg.gamma0s(), &cfg.taus(&JC_TAU), cfg.times)?);
                }
                if cfg.wants(Model::Dephasing) {
                    out.push(dephasing_derivative_bound(
                        &cfg.etas(),
                        &cfg.ohmicities(),
                        &cfg.taus(&DEPHASING_TAU),
                        cfg.times,
                    )?);
                }
            }
            Check::BoundValidity => {
                let draws = cfg.samples.min(1_000);
                if cfg.wants(Model::Jc) {
                    out.push(jc_random_bounds(draws, cfg.seed, &cfg.quad)?);
                }
                if cfg.wants(Model::Dephasing) {
                    out.push(dephasing_random_bounds(draws, cfg.seed, &cfg.quad)?);
                }
            }
            Check::PureState => {
                if cfg.wants(Model::Jc) {
                    out.push(jc_pure_state(cfg.lambda, &cfg.gamma0s(), &cfg.quad)?);
                }
                if cfg.wants(Model::Dephasing) {
                    out.push(dephasing_pure_state(&cfg.etas(), &cfg.ohmicities(), &cfg.quad)?);
                }
            }
            Check::Factorization => {
                if cfg.wants(Model::Dephasing) {
                    out.push(factorization(&cfg.etas(), &cfg.ohmicities(), &cfg.quad)?);
                }
            }
        }
    }
    Ok(out)
}

/// Analytic JC states against the pseudomode propagation (entrywise, 1e-7)
/// and the closed-form bound against the generic operator-norm bound
/// (relative, 1e-6).
pub fn jc_oracle(
    lambda: f64,
    gamma0s: &[f64],
    taus: &[f64],
    quad: &QuadratureConfig,
) -> Result<(CheckReport, CheckReport)> {
    let mut state_err = Worst::default();
    let mut bound_err = Worst::default();
    for &g in gamma0s {
        let p = JcParams::new(lambda, g)?;
        for &tau in taus {
            for s0 in standard_states() {
                let exact = jc_state_at(&p, &s0, tau);
                let oracle = jc_state_pseudomode(&p, &s0, tau, pseudomode_steps(&p, tau))?;
                state_err.see(exact.max_abs_diff(&oracle), || format!("gamma0={g} tau={tau} s0={s0}"));
                let m = jc_qsl(&p, &s0, tau, quad)?;
                bound_err.see(relative_error(m.closed_form, m.result.tau_qsl_op), || {
                    format!("gamma0={g} tau={tau} s0={s0}")
                });
            }
        }
    }
    Ok((
        state_err.report("jc state vs pseudomode oracle", 1e-7),
        bound_err.report("jc closed form vs generic pipeline", 1e-6),
    ))
}

/// Closed-form Γ_τ against the zero-temperature integral (1e-6), γ_t against
/// central differences of Γ_t (1e-7) and the closed-form bound against the
/// generic pipeline (relative, 1e-6).
pub fn dephasing_oracle(
    etas: &[f64],
    ohmicities: &[f64],
    taus: &[f64],
    quad: &QuadratureConfig,
) -> Result<Vec<CheckReport>> {
    let mut integral = Worst::default();
    let mut rate = Worst::default();
    let mut bound = Worst::default();
    let s0 = BlochState::new(0.6, 0.0, 0.6)?;
    let d = 1e-5;
    for &eta in etas {
        for &s in ohmicities {
            let p = DephasingParams::new(eta, s)?;
            for &tau in taus {
                let at = || format!("eta={eta} s={s} tau={tau}");
                let exact = big_gamma_analytic(&p, tau)?;
                integral.see((exact - big_gamma_numeric(&p, tau)?).abs(), at);
                let fd = (big_gamma_analytic(&p, tau + d)? - big_gamma_analytic(&p, tau - d)?) / (2.0 * d);
                rate.see((dephasing_gamma_t(&p, tau)? - fd).abs(), at);
                let m = dephasing_qsl(&p, &s0, tau, quad)?;
                bound.see(relative_error(m.closed_form, m.result.tau_qsl_op), at);
            }
        }
    }
    Ok(vec![
        integral.report("dephasing factor closed form vs integral", 1e-6),
        rate.report("dephasing rate vs finite differences", 1e-7),
        bound.report("dephasing closed form vs generic pipeline", 1e-6),
    ])
}

/// Random complex 2×2 matrices must satisfy tr ≥ hs ≥ op; the worst slack is
/// the largest amount by which an inequality is violated.
pub fn norm_ordering(samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Worst::default();
    for k in 0..samples {
        let mut v = [0.0; 8];
        rng.fill(&mut v[..]);
        let e: Vec<num_complex::Complex64> =
            v.chunks(2).map(|c| num_complex::Complex64::new(2.0 * c[0] - 1.0, 2.0 * c[1] - 1.0)).collect();
        let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        let m = Matrix2c::new(e[0], e[1], e[2], e[3]).scale(scale.into());
        let n = norms(&m);
        let violation = ((n.op - n.hs) / n.hs.max(1.0)).max((n.hs - n.tr) / n.tr.max(1.0)).max(0.0);
        worst.see(violation, || format!("sample {k}"));
    }
    let mut r = worst.report("norm ordering tr >= hs >= op", 1e-12);
    r.detail = format!("seed {seed}; {}", r.detail).trim_end_matches("; ").to_string();
    r
}

pub fn jc_derivative_bound(lambda: f64, gamma0s: &[f64], taus: &[f64], times: usize) -> Result<CheckReport> {
    let mut worst = Worst::default();
    for &g in gamma0s {
        let p = JcParams::new(lambda, g)?;
        for &tau in taus {
            for s0 in standard_states() {
                let traj = JcTrajectory { params: p, s0 };
                let r = derivative_bound_check(&traj, &s0, tau, times)?;
                worst.see(r.max_violation.max(0.0), || {
                    format!("gamma0={g} tau={tau} s0={s0} t={}", r.worst_time)
                });
            }
        }
    }
    Ok(worst.report("jc derivative bound", DERIVATIVE_BOUND_TOL))
}

pub fn dephasing_derivative_bound(
    etas: &[f64],
    ohmicities: &[f64],
    taus: &[f64],
    times: usize,
) -> Result<CheckReport> {
    let mut worst = Worst::default();
    for &eta in etas {
        for &s in ohmicities {
            let p = DephasingParams::new(eta, s)?;
            for &tau in taus {
                for s0 in standard_states() {
                    let traj = DephasingTrajectory { params: p, s0 };
                    let r = derivative_bound_check(&traj, &s0, tau, times)?;
                    worst.see(r.max_violation.max(0.0), || {
                        format!("eta={eta} s={s} tau={tau} s0={s0} t={}", r.worst_time)
                    });
                }
            }
        }
    }
    Ok(worst.report("dephasing derivative bound", DERIVATIVE_BOUND_TOL))
}

fn random_state(rng: &mut ChaCha8Rng) -> BlochState {
    loop {
        let (x, y, z) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if let Ok(s) = BlochState::new(x, y, z) {
            return s;
        }
    }
}

/// Excess of the bound over the driving time, relative to τ. Because the
/// bound is attained in several limits, the tolerance is the quadrature's.
fn excess(bound: f64, tau: f64) -> f64 {
    ((bound - tau) / tau).max(0.0)
}

pub fn jc_random_bounds(draws: usize, seed: u64, quad: &QuadratureConfig) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6a63);
    let mut worst = Worst::default();
    for _ in 0..draws {
        let lambda = 10f64.powf(rng.gen_range(-1.0..1.7));
        let gamma0 = 10f64.powf(rng.gen_range(-1.0..1.7));
        let tau = rng.gen_range(0.05..3.0);
        let s0 = random_state(&mut rng);
        let p = JcParams::new(lambda, gamma0)?;
        let m = jc_qsl(&p, &s0, tau, quad)?;
        let e = excess(m.result.tau_qsl_unified, tau).max(excess(m.closed_form, tau));
        worst.see(e, || format!("lambda={lambda} gamma0={gamma0} tau={tau} s0={s0}"));
    }
    Ok(worst.report("jc bound <= tau on random draws", quad.rel_tol))
}

pub fn dephasing_random_bounds(draws: usize, seed: u64, quad: &QuadratureConfig) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6470);
    let mut worst = Worst::default();
    for _ in 0..draws {
        let eta = 10f64.powf(rng.gen_range(-1.0..0.5));
        let s = rng.gen_range(0.3..4.0);
        let tau = rng.gen_range(0.05..5.0);
        let s0 = random_state(&mut rng);
        let p = DephasingParams::new(eta, s)?;
        let m = dephasing_qsl(&p, &s0, tau, quad)?;
        let e = excess(m.result.tau_qsl_unified, tau).max(excess(m.closed_form, tau));
        worst.see(e, || format!("eta={eta} s={s} tau={tau} s0={s0}"));
    }
    Ok(worst.report("dephasing bound <= tau on random draws", quad.rel_tol))
}

pub const PURE_AMPLITUDES: [f64; 4] = [0.0, 0.25, FRAC_1_SQRT_2, 1.0];
pub const PURE_BETAS: [f64; 4] = [0.0, 0.5, FRAC_1_SQRT_2, 1.0];

/// The pure-state JC formula against the mixed-state one at
/// C² = 4α²(1−α²), ⟨σ_z⟩ = 2α²−1.
pub fn jc_pure_state(lambda: f64, gamma0s: &[f64], quad: &QuadratureConfig) -> Result<CheckReport> {
    let mut worst = Worst::default();
    for &g in gamma0s {
        let p = JcParams::new(lambda, g)?;
        for &tau in &JC_TAU {
            for &a in &PURE_AMPLITUDES {
                let a2 = a * a;
                let c = (4.0 * a2 * (1.0 - a2)).sqrt();
                let s0 = BlochState::from_coherence(c, 0.0, 2.0 * a2 - 1.0)?;
                let mixed = jc_qsl(&p, &s0, tau, quad)?.closed_form;
                let pure = jc_qsl_pure(&p, a, tau)?;
                worst.see((pure - mixed).abs(), || format!("gamma0={g} tau={tau} alpha={a}"));
            }
        }
    }
    Ok(worst.report("jc pure-state reduction", 1e-10))
}

pub fn dephasing_pure_state(etas: &[f64], ohmicities: &[f64], quad: &QuadratureConfig) -> Result<CheckReport> {
    let mut worst = Worst::default();
    for &eta in etas {
        for &s in ohmicities {
            let p = DephasingParams::new(eta, s)?;
            for &tau in &DEPHASING_TAU {
                for &b in &PURE_BETAS {
                    let c = 2.0 * b * (1.0 - b * b).sqrt();
                    let s0 = BlochState::from_coherence(c, 0.0, 2.0 * b * b - 1.0)?;
                    let mixed = dephasing_qsl(&p, &s0, tau, quad)?.closed_form;
                    let pure = dephasing_qsl_pure(&p, b, tau)?;
                    worst.see((pure - mixed).abs(), || format!("eta={eta} s={s} tau={tau} beta={b}"));
                }
            }
        }
    }
    Ok(worst.report("dephasing pure-state reduction", 1e-10))
}

/// τ_qsl/C constant in C and τ_qsl constant in ⟨σ_z⟩ at fixed bath.
pub fn factorization(etas: &[f64], ohmicities: &[f64], quad: &QuadratureConfig) -> Result<CheckReport> {
    let mut worst = Worst::default();
    for &eta in etas {
        for &s in ohmicities {
            let p = DephasingParams::new(eta, s)?;
            for &tau in &DEPHASING_TAU {
                let unit = dephasing_qsl(&p, &BlochState::new(1.0, 0.0, 0.0)?, tau, quad)?.closed_form;
                for c in [0.1, 0.25, 0.5, 0.75, 0.9] {
                    for sz in [-0.4, 0.0, 0.3] {
                        let s0 = BlochState::from_coherence(c, 0.0, sz)?;
                        let v = dephasing_qsl(&p, &s0, tau, quad)?.closed_form;
                        worst.see(relative_error(v / c, unit), || {
                            format!("eta={eta} s={s} tau={tau} C={c} sz={sz}")
                        });
                    }
                }
            }
        }
    }
    Ok(worst.report("dephasing factorization law", 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(Check::parse(c.name()), Some(c));
        }
        assert_eq!(Check::parse("nope"), None);
    }

    #[test]
    fn norm_ordering_is_reproducible() {
        let a = norm_ordering(500, 7);
        let b = norm_ordering(500, 7);
        assert_eq!(a, b);
        assert!(a.passed);
    }

    #[test]
    fn worst_tracks_nan_as_failure() {
        let mut w = Worst::default();
        w.see(1e-9, || "a".into());
        w.see(f64::NAN, || "b".into());
        let r = w.report("x", 1.0);
        assert!(!r.passed);
        assert_eq!(r.detail, "worst at b");
    }

    #[test]
    fn relative_error_handles_zero() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert_eq!(relative_error(1.0, 0.5), 0.5);
    }
}
