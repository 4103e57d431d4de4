//! Composite Simpson quadrature with Richardson refinement.
//!
//! Integrands may carry isolated kinks (absolute values of functions that
//! cross zero). Callers pass the kink locations as breakpoints; every piece
//! between breakpoints is then smooth and Simpson's rule converges at fourth
//! order.

use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Simpson node count on the full interval (odd, ≥ 3).
    pub nodes: usize,
    /// Relative change between successive refinements accepted as converged.
    pub rel_tol: f64,
    /// Number of node doublings allowed beyond the first comparison.
    pub max_refinements: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes: 2001,
            rel_tol: 1e-8,
            max_refinements: 4,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 3 || self.nodes % 2 == 0 {
            return Err(QslError::param(
                "nodes",
                self.nodes as f64,
                "must be odd and >= 3",
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QslError::param("rel_tol", self.rel_tol, "must be > 0"));
        }
        Ok(())
    }
}

/// Plain composite Simpson rule on `[a, b]` with `n` (odd) nodes, applied
/// componentwise to a vector-valued integrand.
pub fn simpson<const N: usize, F>(f: &mut F, a: f64, b: f64, n: usize) -> Result<[f64; N]>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    debug_assert!(n >= 3 && n % 2 == 1);
    let h = (b - a) / (n - 1) as f64;
    let mut acc = [0.0; N];
    for i in 0..n {
        // last node pinned to b to avoid drift
        let x = if i == n - 1 { b } else { a + h * i as f64 };
        let w = if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let fx = f(x)?;
        for k in 0..N {
            acc[k] += w * fx[k];
        }
    }
    for v in acc.iter_mut() {
        *v *= h / 3.0;
    }
    Ok(acc)
}

fn pieces(a: f64, b: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let min_len = 1e-14 * (b - a);
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x.is_finite() && x > a + min_len && x < b - min_len)
        .collect();
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup_by(|x, y| (*x - *y).abs() <= min_len);
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut left = a;
    for c in cuts {
        out.push((left, c));
        left = c;
    }
    out.push((left, b));
    out
}

fn odd_at_least(n: usize, floor: usize) -> usize {
    let n = n.max(floor);
    if n % 2 == 0 {
        n + 1
    } else {
        n
    }
}

/// Integrates a vector-valued function over `[a, b]`, splitting at the given
/// breakpoints. Node counts are doubled until every component changes by at
/// most `rel_tol` relatively; the returned value carries one Richardson step.
pub fn integrate<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<[f64; N]>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    cfg.validate()?;
    if b <= a {
        return Ok([0.0; N]);
    }
    let parts = pieces(a, b, breakpoints);
    let base: Vec<usize> = parts
        .iter()
        .map(|(l, r)| {
            let share = ((cfg.nodes - 1) as f64 * (r - l) / (b - a)).ceil() as usize + 1;
            odd_at_least(share, 9)
        })
        .collect();

    // largest integrand magnitude seen, for an absolute floor near zero
    let mut peak = [0.0f64; N];
    let mut level = |k: u32| -> Result<([f64; N], [f64; N])> {
        let mut tracked = |x: f64| -> Result<[f64; N]> {
            let v = f(x)?;
            for i in 0..N {
                peak[i] = peak[i].max(v[i].abs());
            }
            Ok(v)
        };
        let mut total = [0.0; N];
        for ((l, r), n) in parts.iter().zip(&base) {
            let nodes = (n - 1) * 2usize.pow(k) + 1;
            let part = simpson(&mut tracked, *l, *r, nodes)?;
            for i in 0..N {
                total[i] += part[i];
            }
        }
        Ok((total, peak))
    };

    let (mut coarse, _) = level(0)?;
    let mut worst = f64::INFINITY;
    for k in 1..=(cfg.max_refinements as u32 + 1) {
        let (fine, peak) = level(k)?;
        worst = 0.0;
        for i in 0..N {
            let diff = (fine[i] - coarse[i]).abs();
            let floor = 1e3 * f64::EPSILON * (b - a) * peak[i];
            let rel = if diff <= floor { 0.0 } else { diff / fine[i].abs() };
            worst = worst.max(rel);
        }
        if worst <= cfg.rel_tol {
            let mut out = fine;
            for i in 0..N {
                out[i] += (fine[i] - coarse[i]) / 15.0;
            }
            return Ok(out);
        }
        coarse = fine;
    }
    Err(QslError::NonConvergence {
        what: "composite Simpson quadrature",
        achieved: worst,
        target: cfg.rel_tol,
    })
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate(|x| f(x).map(|v| [v]), a, b, breakpoints, cfg).map(|v| v[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::default();
        let v = integrate_scalar(|x| Ok(x * x * x - 2.0 * x), 0.0, 2.0, &[], &cfg).unwrap();
        assert_relative_eq!(v, 0.0, epsilon = 1e-13);
        let v = simpson(&mut |x: f64| Ok([x * x]), 0.0, 3.0, 3).unwrap();
        assert_relative_eq!(v[0], 9.0, epsilon = 1e-14);
    }

    #[test]
    fn kink_with_breakpoint() {
        let cfg = QuadratureConfig::default();
        let f = |x: f64| Ok((x - 1.0 / 3.0).abs());
        let exact = 0.5 * (1.0f64 / 9.0 + 4.0 / 9.0);
        let v = integrate_scalar(f, 0.0, 1.0, &[1.0 / 3.0], &cfg).unwrap();
        assert_relative_eq!(v, exact, max_relative = 1e-14);
    }

    #[test]
    fn smooth_oscillatory_integral() {
        let cfg = QuadratureConfig::default();
        let v = integrate_scalar(|x| Ok(x.sin()), 0.0, std::f64::consts::PI, &[], &cfg).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn vector_integrand() {
        let cfg = QuadratureConfig::default();
        let v = integrate(|x| Ok([1.0, x, x.exp()]), 0.0, 1.0, &[0.5], &cfg).unwrap();
        assert_relative_eq!(v[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(v[1], 0.5, max_relative = 1e-14);
        assert_relative_eq!(v[2], 1f64.exp() - 1.0, max_relative = 1e-13);
    }

    #[test]
    fn zero_integrand_converges() {
        let cfg = QuadratureConfig::default();
        assert_eq!(integrate_scalar(|_| Ok(0.0), 0.0, 1.0, &[], &cfg).unwrap(), 0.0);
    }

    #[test]
    fn reports_non_convergence() {
        let cfg = QuadratureConfig {
            nodes: 3,
            rel_tol: 1e-15,
            max_refinements: 0,
        };
        let r = integrate_scalar(|x| Ok((50.0 * x).sin().abs()), 0.0, 1.0, &[], &cfg);
        assert!(matches!(r, Err(QslError::NonConvergence { .. })));
    }

    #[test]
    fn rejects_even_node_count() {
        let cfg = QuadratureConfig {
            nodes: 100,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn breakpoints_outside_range_are_ignored() {
        let p = pieces(0.0, 1.0, &[-1.0, 0.0, 0.5, 0.5, 1.0, 2.0, f64::NAN]);
        assert_eq!(p, vec![(0.0, 0.5), (0.5, 1.0)]);
    }
}
