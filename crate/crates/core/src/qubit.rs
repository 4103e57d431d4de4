//! Qubit state algebra: Bloch vectors, 2×2 complex matrices, the
//! relative-purity angle and singular-value norms.
//!
//! Basis ordering follows the excited-state-first convention: index 0 is
//! the excited level |1⟩, index 1 the ground level |0⟩, so that
//! `ρ = ½[[1+rz, rx−i·ry], [rx+i·ry, 1−rz]]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};

/// Slack allowed on |r| ≤ 1 before a Bloch vector is rejected.
pub const POSITIVITY_EPS: f64 = 1e-12;

/// Tolerance used when validating Hermiticity and unit trace.
pub const DENSITY_TOL: f64 = 1e-12;

/// A qubit state as a real Bloch vector with |r| ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    rx: f64,
    ry: f64,
    rz: f64,
}

impl BlochState {
    pub fn new(rx: f64, ry: f64, rz: f64) -> Result<Self> {
        if !(rx.is_finite() && ry.is_finite() && rz.is_finite()) {
            return Err(QslError::UnphysicalState { norm: f64::NAN });
        }
        let norm = (rx * rx + ry * ry + rz * rz).sqrt();
        if norm > 1.0 + POSITIVITY_EPS {
            return Err(QslError::UnphysicalState { norm });
        }
        Ok(Self { rx, ry, rz })
    }

    /// Builds a state from its l1 coherence, the phase of the coherence and
    /// the excited population ⟨σ_z⟩₀.
    pub fn from_coherence(coherence: f64, phase: f64, sz: f64) -> Result<Self> {
        if coherence < 0.0 {
            return Err(QslError::param("coherence", coherence, "must be >= 0"));
        }
        Self::new(coherence * phase.cos(), coherence * phase.sin(), sz)
    }

    pub fn maximally_mixed() -> Self {
        Self { rx: 0.0, ry: 0.0, rz: 0.0 }
    }

    pub fn excited() -> Self {
        Self { rx: 0.0, ry: 0.0, rz: 1.0 }
    }

    pub fn ground() -> Self {
        Self { rx: 0.0, ry: 0.0, rz: -1.0 }
    }

    pub fn rx(&self) -> f64 {
        self.rx
    }

    pub fn ry(&self) -> f64 {
        self.ry
    }

    pub fn rz(&self) -> f64 {
        self.rz
    }

    /// ⟨σ_z⟩₀, identical to `rz`.
    pub fn sz(&self) -> f64 {
        self.rz
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &BlochState) -> f64 {
        self.rx * other.rx + self.ry * other.ry + self.rz * other.rz
    }

    pub fn is_maximally_mixed(&self) -> bool {
        self.rx == 0.0 && self.ry == 0.0 && self.rz == 0.0
    }
}

impl fmt::Display for BlochState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.rx, self.ry, self.rz)
    }
}

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Matrix2c {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Matrix2c {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn diag(d1: f64, d2: f64) -> Self {
        Self::from_real(d1, 0.0, 0.0, d2)
    }

    pub fn pauli_z() -> Self {
        Self::diag(1.0, -1.0)
    }

    /// σ₊ = |1⟩⟨0| in the excited-first basis.
    pub fn sigma_plus() -> Self {
        Self::from_real(0.0, 1.0, 0.0, 0.0)
    }

    /// σ₋ = |0⟩⟨1| in the excited-first basis.
    pub fn sigma_minus() -> Self {
        Self::from_real(0.0, 0.0, 1.0, 0.0)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.a11.conj(), self.a21.conj(), self.a12.conj(), self.a22.conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// tr[self · other] without forming the product.
    pub fn trace_product(&self, other: &Matrix2c) -> Complex64 {
        self.a11 * other.a11 + self.a12 * other.a21 + self.a21 * other.a12 + self.a22 * other.a22
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix2c) -> f64 {
        (*self - *other)
            .entries()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Eigenvalues (ascending) of the Hermitian part of the matrix.
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.a11.re + self.a22.re);
        let half_gap = 0.5 * (self.a11.re - self.a22.re);
        let off = 0.5 * (self.a12 + self.a21.conj());
        let radius = half_gap.hypot(off.norm());
        (mean - radius, mean + radius)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(
            self.a11 * factor,
            self.a12 * factor,
            self.a21 * factor,
            self.a22 * factor,
        )
    }
}

impl Add for Matrix2c {
    type Output = Matrix2c;
    fn add(self, rhs: Matrix2c) -> Matrix2c {
        Matrix2c::new(
            self.a11 + rhs.a11,
            self.a12 + rhs.a12,
            self.a21 + rhs.a21,
            self.a22 + rhs.a22,
        )
    }
}

impl Sub for Matrix2c {
    type Output = Matrix2c;
    fn sub(self, rhs: Matrix2c) -> Matrix2c {
        Matrix2c::new(
            self.a11 - rhs.a11,
            self.a12 - rhs.a12,
            self.a21 - rhs.a21,
            self.a22 - rhs.a22,
        )
    }
}

impl Neg for Matrix2c {
    type Output = Matrix2c;
    fn neg(self) -> Matrix2c {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Matrix2c {
    type Output = Matrix2c;
    fn mul(self, rhs: Matrix2c) -> Matrix2c {
        Matrix2c::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }
}

impl Mul<f64> for Matrix2c {
    type Output = Matrix2c;
    fn mul(self, rhs: f64) -> Matrix2c {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// The three singular-value norms of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormTriple {
    /// Operator (spectral) norm, the largest singular value.
    pub op: f64,
    /// Hilbert-Schmidt (Frobenius) norm.
    pub hs: f64,
    /// Trace (nuclear) norm, the sum of singular values.
    pub tr: f64,
}

impl NormTriple {
    pub fn is_ordered(&self, slack: f64) -> bool {
        self.tr + slack >= self.hs && self.hs + slack >= self.op
    }
}

pub fn bloch_to_density(s: &BlochState) -> Matrix2c {
    let c = Complex64::new(s.rx, -s.ry);
    Matrix2c::new(
        Complex64::new(0.5 * (1.0 + s.rz), 0.0),
        0.5 * c,
        0.5 * c.conj(),
        Complex64::new(0.5 * (1.0 - s.rz), 0.0),
    )
}

pub fn density_to_bloch(m: &Matrix2c) -> Result<BlochState> {
    let defect = m.hermiticity_defect();
    if defect > DENSITY_TOL {
        return Err(QslError::InvalidDensity(format!(
            "not Hermitian (defect {defect:e})"
        )));
    }
    let tr = m.trace();
    if (tr - 1.0).norm() > DENSITY_TOL {
        return Err(QslError::InvalidDensity(format!("trace {tr} != 1")));
    }
    let off = m.a21 + m.a12.conj();
    BlochState::new(off.re, off.im, m.a11.re - m.a22.re)
}

/// tr[ρ²] = (1 + |r|²)/2.
pub fn purity(s: &BlochState) -> f64 {
    0.5 * (1.0 + s.dot(s))
}

/// l1-norm coherence Σ_{i≠j}|ρ_ij| = √(rx² + ry²).
pub fn coherence_l1(s: &BlochState) -> f64 {
    s.rx.hypot(s.ry)
}

/// Relative-purity distance between an initial and an evolved state,
/// together with the quantities the bounds are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativePurity {
    /// Θ in [0, π/2].
    pub theta: f64,
    /// sin²Θ · tr[ρ₀²] = tr[ρ₀²] − tr[ρ₀ρ_t], after clamping.
    pub deficit: f64,
    /// tr[ρ₀²].
    pub purity0: f64,
    /// Set when tr[ρ₀ρ_t]/tr[ρ₀²] fell outside [0, 1] and was clamped.
    pub clamped: bool,
}

/// Evaluates Θ(ρ₀, ρ_t) = arccos √(tr[ρ₀ρ_t]/tr[ρ₀²]) with the ratio clamped
/// to [0, 1]. The deficit is formed from the Bloch-vector difference
/// r₀·(r₀ − r_t)/2 so it stays accurate when Θ is small.
pub fn relative_purity(s0: &BlochState, st: &BlochState) -> RelativePurity {
    let purity0 = purity(s0);
    let diff = [s0.rx - st.rx, s0.ry - st.ry, s0.rz - st.rz];
    let raw = 0.5 * (s0.rx * diff[0] + s0.ry * diff[1] + s0.rz * diff[2]);
    let (deficit, clamped) = if raw < 0.0 {
        (0.0, true)
    } else if raw > purity0 {
        (purity0, true)
    } else {
        (raw, false)
    };
    let theta = (deficit / purity0).sqrt().min(1.0).asin();
    RelativePurity {
        theta,
        deficit,
        purity0,
        clamped,
    }
}

pub fn relative_purity_angle(s0: &BlochState, st: &BlochState) -> f64 {
    relative_purity(s0, st).theta
}

/// Singular values (σ₁ ≥ σ₂ ≥ 0) of a 2×2 complex matrix.
///
/// The eigenvalues of m†m are `s ± |w|` where `s = ‖m‖²_F / 2` and `w` is the
/// real Pauli vector of m†m. Working with `|w|` directly instead of the
/// discriminant of the characteristic quadratic keeps near-degenerate pairs
/// accurate.
pub fn singular_values_2x2(m: &Matrix2c) -> (f64, f64) {
    let half = 0.5;
    let m0 = (m.a11 + m.a22) * half;
    let mx = (m.a12 + m.a21) * half;
    let my = Complex64::i() * (m.a12 - m.a21) * half;
    let mz = (m.a11 - m.a22) * half;
    let v = [mx, my, mz];
    let vc = [mx.conj(), my.conj(), mz.conj()];
    // m*×m is purely imaginary; i(m*×m) = -Im(m*×m).
    let cross = [
        vc[1] * v[2] - vc[2] * v[1],
        vc[2] * v[0] - vc[0] * v[2],
        vc[0] * v[1] - vc[1] * v[0],
    ];
    let mut w = [0.0; 3];
    for k in 0..3 {
        w[k] = 2.0 * (m0.conj() * v[k]).re - cross[k].im;
    }
    let w_norm = w[0].hypot(w[1]).hypot(w[2]);
    let s = m0.norm_sqr() + v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let det = m.det().norm();
    let sum = (2.0 * (s + det)).sqrt();
    if sum == 0.0 {
        return (0.0, 0.0);
    }
    let gap = 2.0 * w_norm / sum;
    let s1 = 0.5 * (sum + gap);
    // σ₁σ₂ = |det m| avoids cancellation in (sum − gap) when σ₂ ≪ σ₁
    let s2 = (det / s1).min(s1);
    (s1, s2)
}

pub fn norms(m: &Matrix2c) -> NormTriple {
    let (s1, s2) = singular_values_2x2(m);
    NormTriple {
        op: s1,
        hs: s1.hypot(s2),
        tr: s1 + s2,
    }
}
