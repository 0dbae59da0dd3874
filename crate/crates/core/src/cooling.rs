//! Linearized four-mode open dynamics: drift/diffusion construction for the
//! fluctuation operators (a, b, c, d, a†, b†, c†, d†), moment evolution, the
//! Lyapunov steady state, and the drift spectrum.
//!
//! The mirror mode b carries the phonon number of interest; d is the
//! collective atomic polarization treated as a bosonic mode (low-excitation
//! limit), with the collective enhancement absorbed into its coupling g_at.
//! Second moments are stored as the Hermitian matrix S with S_ij = ⟨u_i u_j†⟩
//! over the doubled operator vector, so occupancies sit in the daggered
//! block: ⟨b†b⟩ = S[5,5]. First moments are identically zero in the
//! fluctuation picture and are carried only for completeness.

use alloc::vec::Vec;

use nalgebra::SVector;
use num_complex::Complex64;

use crate::linalg::{self, CMat8};
use crate::ode::{self, MomentFlow, StepControl};
use crate::{Error, Result};

/// Dimensionless (or rad/s; any one consistent unit) linearized parameters.
///
/// All detunings are in the laser frame; G is the field-enhanced
/// optomechanical coupling around the working point; n_th the environmental
/// phonon occupancy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedParams {
    /// Effective optomechanical-cavity detuning Δ.
    pub delta: f64,
    /// Feedback-cavity detuning Δ_C.
    pub delta_c: f64,
    /// Atomic detuning Δ_at.
    pub delta_at: f64,
    /// Mechanical frequency ω_m.
    pub omega_m: f64,
    /// Optomechanical cavity decay k_A.
    pub k_a: f64,
    /// Feedback cavity decay k_C.
    pub k_c: f64,
    /// Atomic polarization decay γ_at.
    pub gamma_at: f64,
    /// Mechanical damping γ_m.
    pub gamma_m: f64,
    /// Atom–cavity coupling g_at.
    pub g_at: f64,
    /// Cavity–cavity photon hopping J.
    pub j: f64,
    /// Field-enhanced optomechanical coupling G.
    pub g: f64,
    /// Thermal phonon occupancy n_th.
    pub n_th: f64,
}

impl LinearizedParams {
    /// Checks rates and occupancy domains. Couplings and detunings may take
    /// either sign (phase conventions), but must be finite.
    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("omega_m", self.omega_m),
            ("k_a", self.k_a),
            ("k_c", self.k_c),
            ("gamma_at", self.gamma_at),
            ("gamma_m", self.gamma_m),
            ("n_th", self.n_th),
        ];
        for (name, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "finite and >= 0",
                });
            }
        }
        let finite = [
            ("delta", self.delta),
            ("delta_c", self.delta_c),
            ("delta_at", self.delta_at),
            ("g_at", self.g_at),
            ("j", self.j),
            ("g", self.g),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "finite",
                });
            }
        }
        Ok(())
    }
}

/// How Lindblad rates map onto amplitude decay of the optical/atomic modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DissipatorConvention {
    /// ⟨a⟩ decays at k_A (quantum Langevin convention); likewise c at k_C
    /// and d at γ_at. The default, matching the steady-state layer.
    #[default]
    Langevin,
    /// ⟨a⟩ decays at k_A/2 (master-equation prefactors read literally);
    /// likewise c and d. The mechanical mode is γ_m/2 in both conventions.
    MasterEquation,
}

/// Drift and diffusion of the doubled-operator moment flow.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedSystem {
    /// 8×8 drift M: d⟨u⟩/dt = M⟨u⟩, dS/dt = M S + S M† + D.
    pub drift: CMat8,
    /// 8×8 diffusion D (Hermitian, diagonal here).
    pub diffusion: CMat8,
}

/// Mode labels for occupancy lookups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Optomechanical cavity photons ⟨a†a⟩.
    CavityA,
    /// Mirror phonons ⟨b†b⟩.
    Mirror,
    /// Feedback cavity photons ⟨c†c⟩.
    CavityC,
    /// Collective atomic excitations ⟨d†d⟩.
    Atom,
}

impl Mode {
    fn index(self) -> usize {
        match self {
            Mode::CavityA => 0,
            Mode::Mirror => 1,
            Mode::CavityC => 2,
            Mode::Atom => 3,
        }
    }
}

/// First and second moments at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    /// Time in the reciprocal units of the parameters (1/ω_m units when the
    /// parameters are given in units of ω_m). The Lyapunov steady state
    /// carries +∞.
    pub t: f64,
    /// ⟨u_i⟩; identically zero in the linearized fluctuation picture.
    pub first: SVector<Complex64, 8>,
    /// S_ij = ⟨u_i u_j†⟩ over u = (a, b, c, d, a†, b†, c†, d†).
    pub second: CMat8,
}

impl MomentState {
    /// All modes in vacuum, no thermal excitation.
    pub fn vacuum() -> Self {
        let mut second = CMat8::zeros();
        for i in 0..4 {
            second[(i, i)] = Complex64::new(1.0, 0.0);
        }
        MomentState {
            t: 0.0,
            first: SVector::zeros(),
            second,
        }
    }

    /// Mirror at thermal occupancy n_th, everything else vacuum, all
    /// cross moments zero.
    pub fn thermal_mechanical(n_th: f64) -> Self {
        let mut state = Self::vacuum();
        state.second[(1, 1)] = Complex64::new(n_th + 1.0, 0.0);
        state.second[(5, 5)] = Complex64::new(n_th, 0.0);
        state
    }

    /// Occupancy ⟨mode† mode⟩; real up to enforced Hermiticity.
    pub fn occupancy(&self, mode: Mode) -> f64 {
        let i = 4 + mode.index();
        self.second[(i, i)].re
    }

    /// Largest deviation |S_ij − conj(S_ji)| from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let asym = self.second - self.second.adjoint();
        asym.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Integration and sampling controls for [`evolve_moments`].
#[derive(Debug, Clone, Copy)]
pub struct DtControl {
    /// Relative tolerance per moment entry.
    pub rtol: f64,
    /// Absolute tolerance; `None` scales 1e-9 by the initial state's largest
    /// diagonal, so occupancy-sized moments and near-zero moments are both
    /// resolved sensibly.
    pub atol: Option<f64>,
    /// Number of emitted samples (≥ 2), evenly spaced including both ends.
    pub samples: usize,
    /// Attempt budget before giving up.
    pub max_steps: usize,
    /// Overrides the automatic first step.
    pub initial_dt: Option<f64>,
}

impl Default for DtControl {
    fn default() -> Self {
        DtControl {
            rtol: 1e-6,
            atol: None,
            samples: 200,
            max_steps: 50_000_000,
            initial_dt: None,
        }
    }
}

/// A sampled moment trajectory with run diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sampled states in time order; first is the initial state, last is at
    /// the final time.
    pub states: Vec<MomentState>,
    /// Largest Hermiticity drift seen before per-step re-Hermitization.
    pub max_hermiticity_drift: f64,
    /// Accumulated local error estimate on ⟨b†b⟩; a bound on the
    /// tolerance-limited part of the final phonon number's error.
    pub error_estimate: f64,
    /// Accepted integrator steps.
    pub steps: usize,
}

impl Trajectory {
    /// The phonon occupancy ⟨b†b⟩ over time, as (t, n_b) pairs.
    pub fn phonon_history(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.states.iter().map(|s| (s.t, s.occupancy(Mode::Mirror)))
    }
}

/// Builds drift and diffusion in the Langevin dissipator convention.
pub fn build_linearized_system(p: &LinearizedParams) -> LinearizedSystem {
    build_linearized_system_with(p, DissipatorConvention::Langevin)
}

/// Builds drift and diffusion in the given dissipator convention.
///
/// Drift rows (Langevin):
/// d⟨a⟩/dt = −(k_A + iΔ)a + iG(b + b†) − iJc,
/// d⟨b⟩/dt = −(γ_m/2 + iω_m)b + iG(a + a†),
/// d⟨c⟩/dt = −(k_C + iΔ_C)c − iJa − i·g_at·d,
/// d⟨d⟩/dt = −(γ_at + iΔ_at)d − i·g_at·c,
/// with the conjugate rows fixed by particle-hole symmetry. The diffusion is
/// the matching input-noise matrix: vacuum inputs for a, c, d and a thermal
/// mechanical input at occupancy n_th.
pub fn build_linearized_system_with(
    p: &LinearizedParams,
    convention: DissipatorConvention,
) -> LinearizedSystem {
    let i = Complex64::new(0.0, 1.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let (optical_scale, optical_diffusion) = match convention {
        DissipatorConvention::Langevin => (1.0, 2.0),
        DissipatorConvention::MasterEquation => (0.5, 1.0),
    };

    let mut m = CMat8::zeros();
    m[(0, 0)] = -re(optical_scale * p.k_a) - i * p.delta;
    m[(0, 1)] = i * p.g;
    m[(0, 5)] = i * p.g;
    m[(0, 2)] = -i * p.j;
    m[(1, 1)] = -re(0.5 * p.gamma_m) - i * p.omega_m;
    m[(1, 0)] = i * p.g;
    m[(1, 4)] = i * p.g;
    m[(2, 2)] = -re(optical_scale * p.k_c) - i * p.delta_c;
    m[(2, 0)] = -i * p.j;
    m[(2, 3)] = -i * p.g_at;
    m[(3, 3)] = -re(optical_scale * p.gamma_at) - i * p.delta_at;
    m[(3, 2)] = -i * p.g_at;
    for r in 0..4 {
        for c in 0..4 {
            m[(4 + r, 4 + c)] = m[(r, c)].conj();
            m[(4 + r, c)] = m[(r, 4 + c)].conj();
        }
    }

    let mut d = CMat8::zeros();
    d[(0, 0)] = re(optical_diffusion * p.k_a);
    d[(1, 1)] = re(p.gamma_m * (p.n_th + 1.0));
    d[(2, 2)] = re(optical_diffusion * p.k_c);
    d[(3, 3)] = re(optical_diffusion * p.gamma_at);
    d[(5, 5)] = re(p.gamma_m * p.n_th);

    LinearizedSystem {
        drift: m,
        diffusion: d,
    }
}

/// Eigenvalues of the drift matrix, sorted by real part descending. The
/// system is dynamically stable iff the first entry has negative real part.
pub fn stability_spectrum(sys: &LinearizedSystem) -> Vec<Complex64> {
    linalg::spectrum_8(&sys.drift)
}

/// Integrates dS/dt = M S + S M† + D from `init` to the absolute time
/// `t_final` with the adaptive stiff Rosenbrock scheme, sampling uniformly.
pub fn evolve_moments(
    sys: &LinearizedSystem,
    init: &MomentState,
    t_final: f64,
    ctrl: &DtControl,
) -> Result<Trajectory> {
    if !t_final.is_finite() || t_final < init.t {
        return Err(Error::InvalidParameter {
            name: "t_final",
            value: t_final,
            requirement: "finite and >= the initial state's time",
        });
    }
    if ctrl.samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: ctrl.samples as f64,
            requirement: ">= 2",
        });
    }
    if !(ctrl.rtol > 0.0 && ctrl.rtol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "rtol",
            value: ctrl.rtol,
            requirement: "finite and > 0",
        });
    }
    if init.hermiticity_error() > 1e-9 * (1.0 + max_diagonal(&init.second)) {
        return Err(Error::InvalidParameter {
            name: "init",
            value: init.hermiticity_error(),
            requirement: "Hermitian second-moment matrix (1e-9)",
        });
    }

    let atol = ctrl
        .atol
        .unwrap_or_else(|| 1e-9 * (1.0 + max_diagonal(&init.second)));
    if !(atol >= 0.0 && atol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "atol",
            value: atol,
            requirement: "finite and >= 0",
        });
    }

    let flow = MomentFlow::new(sys.drift, sys.diffusion)?;
    let span = t_final - init.t;
    let n = ctrl.samples;
    let times: Vec<f64> = (0..n)
        .map(|k| {
            if k == n - 1 {
                t_final
            } else {
                init.t + span * k as f64 / (n - 1) as f64
            }
        })
        .collect();
    let control = StepControl {
        rtol: ctrl.rtol,
        atol,
        max_steps: ctrl.max_steps,
        initial_dt: ctrl.initial_dt,
    };
    let (raw, stats) = ode::integrate(&flow, init.second, init.t, &times, &control)?;
    let states = raw
        .into_iter()
        .map(|(t, second)| MomentState {
            t,
            first: SVector::zeros(),
            second,
        })
        .collect();
    Ok(Trajectory {
        states,
        max_hermiticity_drift: stats.max_hermiticity_drift,
        error_estimate: stats.error_estimate_bb,
        steps: stats.steps,
    })
}

/// The unique steady state of a stable drift: M S + S M† + D = 0.
///
/// Errs with the full spectrum when the drift has an eigenvalue with
/// non-negative real part.
pub fn steady_state_moments(sys: &LinearizedSystem) -> Result<MomentState> {
    let spectrum = stability_spectrum(sys);
    if !(spectrum[0].re < 0.0) {
        return Err(Error::UnstableDrift { spectrum });
    }
    let second = linalg::lyapunov_steady_state(&sys.drift, &sys.diffusion)?;
    Ok(MomentState {
        t: f64::INFINITY,
        first: SVector::zeros(),
        second,
    })
}

fn max_diagonal(s: &CMat8) -> f64 {
    (0..8).map(|i| s[(i, i)].norm()).fold(0.0, f64::max)
}
