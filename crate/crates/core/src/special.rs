//! Euler gamma function on the real line.

use std::f64::consts::PI;

use crate::error::{QslError, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real x. Lanczos approximation for x ≥ 1/2, the recurrence
/// Γ(x) = Γ(x+1)/x down to −10 and the reflection formula below that.
/// Non-positive integers are poles.
pub fn gamma_function(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(QslError::param("x", x, "gamma argument is NaN"));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(QslError::Pole {
            what: "gamma function",
            at: x,
        });
    }
    if (-10.0..0.5).contains(&x) {
        let mut shifted = x;
        let mut divisor = 1.0;
        while shifted < 0.5 {
            divisor *= shifted;
            shifted += 1.0;
        }
        return Ok(lanczos(shifted) / divisor);
    }
    if x < 0.5 {
        // Γ(x)Γ(1−x) = π / sin(πx)
        let s = sin_pi(x);
        return Ok(PI / (s * lanczos(1.0 - x)));
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    if x > 171.62 {
        return f64::INFINITY;
    }
    let x = x - 1.0;
    let mut series = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    // split the power to stay finite up to x ≈ 171
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * series
}

/// sin(πx) with exact zeros at integers and reduced argument.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    if r.abs() <= 0.25 {
        (PI * r).sin()
    } else if r > 0.25 && r <= 0.75 {
        (PI * (0.5 - r)).cos()
    } else if r < -0.25 && r >= -0.75 {
        -(PI * (0.5 + r)).cos()
    } else if r > 0.0 {
        (PI * (1.0 - r)).sin()
    } else {
        -(PI * (1.0 + r)).sin()
    }
}
