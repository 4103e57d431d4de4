//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function returns a JSON string; failures surface as a JS
//! exception carrying the error message.

use qslkit::{dephasing_qsl, jc, jc_qsl, BlochState, DephasingParams, JcParams, QuadratureConfig};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn surface_quad() -> QuadratureConfig {
    QuadratureConfig {
        nodes: 401,
        rel_tol: 1e-6,
        max_refinements: 6,
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

fn check_count(n: usize) -> Result<(), String> {
    if (2..=200).contains(&n) {
        Ok(())
    } else {
        Err(format!("grid size {n} must be between 2 and 200"))
    }
}

pub fn jc_point_value(lambda: f64, gamma0: f64, coherence: f64, sz: f64, tau: f64) -> Result<Value, String> {
    let p = JcParams::new(lambda, gamma0).map_err(|e| e.to_string())?;
    let s0 = BlochState::from_coherence(coherence, 0.0, sz).map_err(|e| e.to_string())?;
    let q = jc_qsl(&p, &s0, tau, &QuadratureConfig::default()).map_err(|e| e.to_string())?;
    Ok(json!({
        "regime": jc::jc_regime(&p).label(),
        "closed_form": q.closed_form,
        "result": q.result,
    }))
}

/// τ_QSL over coherence × γ₀ at fixed λ, ⟨σ_z⟩ and τ. Cells outside the
/// Bloch ball are `null`.
pub fn jc_surface_value(lambda: f64, sz: f64, tau: f64, gamma0_max: f64, n: usize) -> Result<Value, String> {
    check_count(n)?;
    let quad = surface_quad();
    let cs = linspace(0.0, 1.0, n);
    let gs = linspace(gamma0_max / n as f64, gamma0_max, n);
    let mut rows = Vec::with_capacity(n);
    for &g in &gs {
        let p = JcParams::new(lambda, g).map_err(|e| e.to_string())?;
        let mut row = Vec::with_capacity(n);
        for &c in &cs {
            let cell = match BlochState::from_coherence(c, 0.0, sz) {
                Ok(s0) => Some(jc_qsl(&p, &s0, tau, &quad).map_err(|e| e.to_string())?.closed_form),
                Err(_) => None,
            };
            row.push(cell);
        }
        rows.push(row);
    }
    Ok(json!({ "coherence": cs, "gamma0": gs, "tau_qsl": rows }))
}

/// τ_QSL against the ohmicity s at fixed coupling, coherence and τ.
pub fn dephasing_curve_value(eta: f64, coherence: f64, tau: f64, s_max: f64, n: usize) -> Result<Value, String> {
    check_count(n)?;
    let quad = surface_quad();
    let s0 = BlochState::from_coherence(coherence, 0.0, 0.0).map_err(|e| e.to_string())?;
    let ss = linspace(qslkit::dephasing::MIN_OHMICITY.max(0.1), s_max, n);
    let mut values = Vec::with_capacity(n);
    for &s in &ss {
        let p = DephasingParams::new(eta, s).map_err(|e| e.to_string())?;
        values.push(dephasing_qsl(&p, &s0, tau, &quad).map_err(|e| e.to_string())?.closed_form);
    }
    Ok(json!({ "s": ss, "tau_qsl": values }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn jc_point(lambda: f64, gamma0: f64, coherence: f64, sz: f64, tau: f64) -> Result<String, JsValue> {
    to_js(jc_point_value(lambda, gamma0, coherence, sz, tau))
}

#[wasm_bindgen]
pub fn jc_surface(lambda: f64, sz: f64, tau: f64, gamma0_max: f64, n: usize) -> Result<String, JsValue> {
    to_js(jc_surface_value(lambda, sz, tau, gamma0_max, n))
}

#[wasm_bindgen]
pub fn dephasing_curve(eta: f64, coherence: f64, tau: f64, s_max: f64, n: usize) -> Result<String, JsValue> {
    to_js(dephasing_curve_value(eta, coherence, tau, s_max, n))
}
