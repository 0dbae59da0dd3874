//! Steady states, optical bistability, and linearized cooling dynamics of a
//! hybrid optomechanical system: a driven cavity with a movable mirror,
//! coupled by photon hopping to a feedback cavity holding an atomic ensemble.
//!
//! The crate has three layers:
//!
//! - [`params`]: SI inputs, the frequency-reading convention, derived
//!   couplings, and the atom-dressed effective cavity response.
//! - [`bistability`] / [`sweep`]: the steady-state intensity cubic, folds and
//!   thresholds, detuning and power sweeps with hysteresis jump detection,
//!   and the 2-D threshold-power map.
//! - [`cooling`]: linearized four-mode moment dynamics — drift/diffusion
//!   construction, adaptive stiff integration of dS/dt = MS + SM† + D,
//!   Lyapunov steady states, and the stability spectrum.
//!
//! `no_std` (with `alloc`); all IO lives in the companion CLI crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]
// Validation guards negate comparisons (`!(x > 0.0)`) so NaN fails the
// domain check along with the wrong sign.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bistability;
pub mod cooling;
pub mod cubic;
pub mod params;
pub mod sweep;

mod error;
mod linalg;
mod ode;

pub use error::{Error, IntegrationFailureReason, Result};
pub use num_complex::Complex64;
