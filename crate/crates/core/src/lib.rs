//! Quantum speed limit bounds for open qubit systems prepared in mixed
//! states.
//!
//! The bound is built from the relative-purity angle between the initial and
//! evolved state and the time-averaged operator, Hilbert-Schmidt and trace
//! norms of the generator. Two exactly solvable models are provided: the
//! damped Jaynes-Cummings model with a Lorentzian bath ([`jc`]) and pure
//! dephasing with an Ohmic-family bath ([`dephasing`]). Each closed form is
//! paired with a model-agnostic numerical evaluation ([`engine`]).
//!
//! ```
//! use qslkit::{jc_qsl, BlochState, JcParams, QuadratureConfig};
//!
//! let params = JcParams::new(15.0, 40.0)?;
//! let state = BlochState::from_coherence(0.6, 0.0, 0.6)?;
//! let q = jc_qsl(&params, &state, 1.0, &QuadratureConfig::default())?;
//! assert!((q.closed_form - 0.6126498).abs() < 1e-6);
//! assert!(q.result.tau_qsl_op <= 1.0);
//! # Ok::<(), qslkit::QslError>(())
//! ```

pub mod dephasing;
pub mod engine;
pub mod error;
pub mod jc;
pub mod quadrature;
pub mod qubit;
pub mod scan;
pub mod special;
pub mod verify;

pub use dephasing::{dephasing_qsl, DephasingParams};
pub use engine::{generic_qsl, ModelQsl, QslResult, Trajectory};
pub use error::{QslError, Result};
pub use jc::{jc_qsl, JcParams, Regime};
pub use quadrature::QuadratureConfig;
pub use qubit::{BlochState, Matrix2c, NormTriple};
pub use scan::{Axis, Model, ScanGrid, ScanRecord};
