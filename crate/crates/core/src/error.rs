use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Why the adaptive integrator gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationFailureReason {
    /// Step size shrank below the resolvable limit at the current time.
    StepSizeUnderflow,
    /// A NaN or infinity appeared in the state.
    NonFiniteState,
    /// The configured step budget ran out before reaching the final time.
    StepBudgetExhausted,
}

/// Errors shared by the parameter, steady-state, sweep, and dynamics layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter failed validation.
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    /// A response denominator vanished: the driven subsystem has no damping
    /// or detuning to absorb the coupling.
    SingularResponse { context: &'static str },
    /// A bistable-only quantity was requested for parameters whose effective
    /// response does not satisfy the bistability condition.
    NotBistable,
    /// The drift matrix has an eigenvalue with non-negative real part, so no
    /// steady state exists. Carries the full spectrum, sorted by real part
    /// descending.
    UnstableDrift { spectrum: Vec<Complex64> },
    /// The moment integrator could not continue past `t_reached`.
    IntegrationFailure {
        t_reached: f64,
        reason: IntegrationFailureReason,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                requirement,
            } => write!(f, "invalid parameter {name} = {value:e}: requires {requirement}"),
            Error::SingularResponse { context } => {
                write!(f, "singular response in {context}: zero denominator")
            }
            Error::NotBistable => write!(f, "parameters are not bistable"),
            Error::UnstableDrift { spectrum } => write!(
                f,
                "drift matrix is unstable: leading eigenvalue {:e}{:+e}i",
                spectrum[0].re, spectrum[0].im
            ),
            Error::IntegrationFailure { t_reached, reason } => {
                let what = match reason {
                    IntegrationFailureReason::StepSizeUnderflow => "step size underflow",
                    IntegrationFailureReason::NonFiniteState => "non-finite state",
                    IntegrationFailureReason::StepBudgetExhausted => "step budget exhausted",
                };
                write!(f, "integration failed at t = {t_reached:e}: {what}")
            }
        }
    }
}

impl core::error::Error for Error {}
