//! Physical parameters and derived quantities for the hybrid system: a
//! driven optomechanical cavity (mode `a`, movable mirror `b`) coupled by
//! photon hopping `J` to a feedback cavity (mode `c`) containing `N` two-level
//! atoms.
//!
//! Everything here is SI (rad/s for rates and detunings) except where a type
//! says otherwise. The atomic ensemble dresses the optomechanical cavity into
//! an effective response `(k_new, delta_new)`; that pair is what the
//! steady-state and sweep layers consume.

use libm::sqrt;
use num_complex::Complex64;

use crate::{Error, Result};

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.0545718e-34;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 2.99792458e8;

/// How quoted frequency values (e.g. "10 MHz") are read.
///
/// `Angular` treats quoted numbers as already angular (10 MHz → 1e7 rad/s);
/// `Ordinary` treats them as cycle frequencies and multiplies by 2π. Values
/// quoted with an explicit 2π are the same number under both readings and
/// must not be rescaled by callers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreqConvention {
    #[default]
    Angular,
    Ordinary,
}

impl FreqConvention {
    /// Converts a quoted frequency value to rad/s under this convention.
    pub fn angular(self, quoted: f64) -> f64 {
        match self {
            FreqConvention::Angular => quoted,
            FreqConvention::Ordinary => core::f64::consts::TAU * quoted,
        }
    }

    /// Stable lowercase name, used in configs and output metadata.
    pub fn label(self) -> &'static str {
        match self {
            FreqConvention::Angular => "angular",
            FreqConvention::Ordinary => "ordinary",
        }
    }
}

/// Mechanical damping, either via quality factor (γ_m = ω_m/Q) or directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MechDamping {
    Quality(f64),
    Rate(f64),
}

/// Full SI parameter set of the hybrid system.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Optomechanical cavity length L (m).
    pub cavity_length: f64,
    /// Movable mirror mass m (kg).
    pub mirror_mass: f64,
    /// Drive laser wavelength λ (m).
    pub laser_wavelength: f64,
    /// Mechanical frequency ω_m (rad/s).
    pub mech_freq: f64,
    /// Mechanical damping (quality factor or direct rate).
    pub mech_damping: MechDamping,
    /// Optomechanical cavity decay k_A (rad/s).
    pub optical_decay_a: f64,
    /// Feedback cavity decay k_C (rad/s).
    pub optical_decay_c: f64,
    /// Optomechanical cavity detuning Δ_A (rad/s).
    pub detuning_a: f64,
    /// Feedback cavity detuning Δ_C (rad/s).
    pub detuning_c: f64,
    /// Atomic detuning Δ_at (rad/s).
    pub atom_detuning: f64,
    /// Atomic decay γ_at (rad/s).
    pub atom_decay: f64,
    /// Single-atom coupling g_at (rad/s).
    pub atom_coupling: f64,
    /// Atom count N.
    pub atom_number: f64,
    /// Cavity-cavity photon hopping J (rad/s).
    pub cavity_coupling: f64,
    /// Input laser power P_in (W).
    pub input_power: f64,
}

impl PhysicalParams {
    /// Checks every field against its domain. Returns the first violation.
    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 5] = [
            ("cavity_length", self.cavity_length),
            ("mirror_mass", self.mirror_mass),
            ("laser_wavelength", self.laser_wavelength),
            ("mech_freq", self.mech_freq),
            ("optical_decay_a", self.optical_decay_a),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "finite and > 0",
                });
            }
        }
        let non_negative: [(&'static str, f64); 4] = [
            ("optical_decay_c", self.optical_decay_c),
            ("atom_decay", self.atom_decay),
            ("atom_number", self.atom_number),
            ("input_power", self.input_power),
        ];
        for (name, value) in non_negative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "finite and >= 0",
                });
            }
        }
        let finite: [(&'static str, f64); 4] = [
            ("detuning_a", self.detuning_a),
            ("detuning_c", self.detuning_c),
            ("atom_detuning", self.atom_detuning),
            ("atom_coupling", self.atom_coupling),
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
        if !self.cavity_coupling.is_finite() {
            return Err(Error::InvalidParameter {
                name: "cavity_coupling",
                value: self.cavity_coupling,
                requirement: "finite",
            });
        }
        let gamma = self.gamma_m();
        if !(gamma > 0.0) || !gamma.is_finite() {
            let (name, value) = match self.mech_damping {
                MechDamping::Quality(q) => ("mech_quality", q),
                MechDamping::Rate(g) => ("gamma_m", g),
            };
            return Err(Error::InvalidParameter {
                name,
                value,
                requirement: "finite positive mechanical damping",
            });
        }
        Ok(())
    }

    /// Mechanical damping rate γ_m (rad/s).
    pub fn gamma_m(&self) -> f64 {
        match self.mech_damping {
            MechDamping::Quality(q) => self.mech_freq / q,
            MechDamping::Rate(g) => g,
        }
    }

    /// Drive laser angular frequency ω_L = 2πc/λ (rad/s).
    pub fn omega_laser(&self) -> f64 {
        core::f64::consts::TAU * SPEED_OF_LIGHT / self.laser_wavelength
    }

    /// Cavity resonance ω_A, taken equal to ω_L for the coupling strength;
    /// the detuning Δ_A carries the difference.
    pub fn omega_cavity(&self) -> f64 {
        self.omega_laser()
    }

    /// Converts a squared drive amplitude |ε_A|² (rad²/s²) to input power (W).
    pub fn drive_sq_to_power(&self, drive_sq: f64) -> f64 {
        drive_sq * HBAR * self.omega_laser() / (2.0 * self.optical_decay_a)
    }

    /// Converts input power (W) to squared drive amplitude |ε_A|² (rad²/s²).
    pub fn power_to_drive_sq(&self, power: f64) -> f64 {
        2.0 * self.optical_decay_a * power / (HBAR * self.omega_laser())
    }
}

/// Atom-dressed optomechanical cavity response.
///
/// `A1`, `A2` are the real/imaginary building blocks of the feedback
/// denominator; `k_new`, `delta_new` are the effective decay and detuning the
/// steady-state cubic sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCavityResponse {
    /// A1 = g_at²N + k_C·γ_at − Δ_C·Δ_at (rad²/s²).
    pub a1: f64,
    /// A2 = Δ_C·γ_at + k_C·Δ_at (rad²/s²).
    pub a2: f64,
    /// Effective decay k_new (rad/s).
    pub k_new: f64,
    /// Effective detuning delta_new (rad/s).
    pub delta_new: f64,
}

impl EffectiveCavityResponse {
    /// Whether the feedback left a net-positive effective decay. Parameter
    /// sets with `k_new <= 0` are representable but rejected by the
    /// steady-state solver.
    pub fn has_positive_decay(&self) -> bool {
        self.k_new > 0.0
    }
}

/// Dimensionless displacement-per-photon coupling
/// χ = (ω_A/(ω_m L))·√(ħ/(m ω_m)).
pub fn scaled_coupling(params: &PhysicalParams) -> Result<f64> {
    params.validate()?;
    let zpf = sqrt(HBAR / (params.mirror_mass * params.mech_freq));
    let chi = params.omega_cavity() / (params.mech_freq * params.cavity_length) * zpf;
    if !chi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "scaled_coupling",
            value: chi,
            requirement: "finite χ (check mass/frequency/length scales)",
        });
    }
    Ok(chi)
}

/// Drive amplitude ε_A = √(2·k_A·P_in/(ħ·ω_L)) (rad/s).
pub fn drive_amplitude(params: &PhysicalParams) -> Result<f64> {
    params.validate()?;
    let eps = sqrt(params.power_to_drive_sq(params.input_power));
    if !eps.is_finite() {
        return Err(Error::InvalidParameter {
            name: "drive_amplitude",
            value: eps,
            requirement: "finite ε_A",
        });
    }
    Ok(eps)
}

/// Effective cavity response seen through the atomic feedback cavity.
///
/// With `J = 0` the response is exactly `(k_A, Δ_A)`. Otherwise the feedback
/// shifts are `J²·(γ_at·A1 + Δ_at·A2)/(A1² + A2²)` on the decay and
/// `J²·(Δ_at·A1 − γ_at·A2)/(A1² + A2²)` on the detuning, which equal
/// `J²·Re[1/(k_C + iΔ_C + g_at²N/(γ_at + iΔ_at))]` and the matching
/// imaginary part but stay finite where the complex form would divide 0/0.
pub fn effective_response(params: &PhysicalParams) -> Result<EffectiveCavityResponse> {
    params.validate()?;
    let a1 = params.atom_coupling * params.atom_coupling * params.atom_number
        + params.optical_decay_c * params.atom_decay
        - params.detuning_c * params.atom_detuning;
    let a2 = params.detuning_c * params.atom_decay + params.optical_decay_c * params.atom_detuning;
    let j = params.cavity_coupling;
    if j == 0.0 {
        return Ok(EffectiveCavityResponse {
            a1,
            a2,
            k_new: params.optical_decay_a,
            delta_new: params.detuning_a,
        });
    }
    let den = a1 * a1 + a2 * a2;
    if den == 0.0 {
        return Err(Error::SingularResponse {
            context: "effective_response (A1 = A2 = 0 with J != 0)",
        });
    }
    let j_sq = j * j;
    let k_new = params.optical_decay_a
        + j_sq * (params.atom_decay * a1 + params.atom_detuning * a2) / den;
    let delta_new =
        params.detuning_a + j_sq * (params.atom_detuning * a1 - params.atom_decay * a2) / den;
    if !k_new.is_finite() || !delta_new.is_finite() {
        return Err(Error::SingularResponse {
            context: "effective_response (feedback term overflow)",
        });
    }
    Ok(EffectiveCavityResponse {
        a1,
        a2,
        k_new,
        delta_new,
    })
}

/// Steady-state feedback-cavity field and collective atomic coherence for a
/// given optomechanical cavity field.
///
/// Returns `(c_S, Σσ₁₂)` with
/// `c_S = −iJ·a/(k_C + iΔ_C + g_at²N/(γ_at + iΔ_at))` and
/// `Σσ₁₂ = −i·g_at·c_S·N/(γ_at + iΔ_at)`. The −i phases follow the
/// Hamiltonian hopping term ħJ(c†a + a†c); only |c_S| is
/// convention-independent.
pub fn atomic_cavity_steady_state(
    params: &PhysicalParams,
    a_field: Complex64,
) -> Result<(Complex64, Complex64)> {
    params.validate()?;
    if params.cavity_coupling == 0.0 {
        return Ok((Complex64::ZERO, Complex64::ZERO));
    }
    let g_sq_n = params.atom_coupling * params.atom_coupling * params.atom_number;
    let atom_denom = Complex64::new(params.atom_decay, params.atom_detuning);
    let atom_term = if g_sq_n == 0.0 {
        Complex64::ZERO
    } else {
        if atom_denom == Complex64::ZERO {
            return Err(Error::SingularResponse {
                context: "atomic_cavity_steady_state (γ_at = Δ_at = 0 with coupled atoms)",
            });
        }
        g_sq_n / atom_denom
    };
    let cavity_denom = Complex64::new(params.optical_decay_c, params.detuning_c) + atom_term;
    if cavity_denom == Complex64::ZERO {
        return Err(Error::SingularResponse {
            context: "atomic_cavity_steady_state (feedback cavity denominator)",
        });
    }
    let c_s = Complex64::new(0.0, -params.cavity_coupling) * a_field / cavity_denom;
    let coupled = params.atom_coupling * params.atom_number;
    let sigma12 = if coupled == 0.0 {
        Complex64::ZERO
    } else {
        if atom_denom == Complex64::ZERO {
            return Err(Error::SingularResponse {
                context: "atomic_cavity_steady_state (γ_at = Δ_at = 0 with coupled atoms)",
            });
        }
        Complex64::new(0.0, -params.atom_coupling) * c_s * params.atom_number / atom_denom
    };
    Ok((c_s, sigma12))
}

/// The same parameter set with every rate and detuning divided by ω_m.
///
/// Keeps the SI anchors (ω_m, geometry, wavelength) so the conversion is
/// exactly invertible.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionlessParams {
    pub k_a: f64,
    pub k_c: f64,
    pub delta_a: f64,
    pub delta_c: f64,
    pub delta_at: f64,
    pub gamma_at: f64,
    pub gamma_m: f64,
    pub g_at: f64,
    pub j: f64,
    pub atom_number: f64,
    /// χ² — together with `drive_sq` this sets the photon-number scale of the
    /// steady-state cubic.
    pub coupling_sq: f64,
    /// |ε_A|²/ω_m².
    pub drive_sq: f64,
    /// Which frequency-unit reading produced the SI inputs.
    pub convention: FreqConvention,
    /// SI anchors for reconstruction.
    pub mech_freq: f64,
    pub cavity_length: f64,
    pub mirror_mass: f64,
    pub laser_wavelength: f64,
}

impl PhysicalParams {
    /// Normalizes to units of ω_m, recording the convention that produced
    /// the SI values.
    pub fn to_dimensionless(&self, convention: FreqConvention) -> Result<DimensionlessParams> {
        self.validate()?;
        let w = self.mech_freq;
        let chi = scaled_coupling(self)?;
        let eps = drive_amplitude(self)?;
        Ok(DimensionlessParams {
            k_a: self.optical_decay_a / w,
            k_c: self.optical_decay_c / w,
            delta_a: self.detuning_a / w,
            delta_c: self.detuning_c / w,
            delta_at: self.atom_detuning / w,
            gamma_at: self.atom_decay / w,
            gamma_m: self.gamma_m() / w,
            g_at: self.atom_coupling / w,
            j: self.cavity_coupling / w,
            atom_number: self.atom_number,
            coupling_sq: chi * chi,
            drive_sq: (eps / w) * (eps / w),
            convention,
            mech_freq: w,
            cavity_length: self.cavity_length,
            mirror_mass: self.mirror_mass,
            laser_wavelength: self.laser_wavelength,
        })
    }
}

impl DimensionlessParams {
    /// Reconstructs the SI parameter set. Mechanical damping comes back as a
    /// direct rate (the derived γ_m is preserved, not the quality factor).
    pub fn to_physical(&self) -> PhysicalParams {
        let w = self.mech_freq;
        let k_a = self.k_a * w;
        let omega_l = core::f64::consts::TAU * SPEED_OF_LIGHT / self.laser_wavelength;
        let input_power = self.drive_sq * w * w * HBAR * omega_l / (2.0 * k_a);
        PhysicalParams {
            cavity_length: self.cavity_length,
            mirror_mass: self.mirror_mass,
            laser_wavelength: self.laser_wavelength,
            mech_freq: w,
            mech_damping: MechDamping::Rate(self.gamma_m * w),
            optical_decay_a: k_a,
            optical_decay_c: self.k_c * w,
            detuning_a: self.delta_a * w,
            detuning_c: self.delta_c * w,
            atom_detuning: self.delta_at * w,
            atom_decay: self.gamma_at * w,
            atom_coupling: self.g_at * w,
            atom_number: self.atom_number,
            cavity_coupling: self.j * w,
            input_power,
        }
    }
}
