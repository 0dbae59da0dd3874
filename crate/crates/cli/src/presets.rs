//! Built-in parameter sets for the bistability and cooling figures, plus the
//! sweep/grid defaults they leave open. Expansion is pure: the same preset
//! name and frequency convention always produce the same parameters.

use optomech::cooling::LinearizedParams;
use optomech::params::{FreqConvention, MechDamping, PhysicalParams};

pub const SWEEP_POINTS: usize = 2000;
/// Default power-sweep window (W); brackets every hysteresis loop the preset
/// families produce.
pub const POWER_RANGE: (f64, f64) = (0.0, 40e-6);
/// Atomic-detuning curve family, in units of γ_at: spans the non-bistable
/// side, the knife edge, a narrow window, the single-cavity-like point, and
/// blue detuning.
pub const DETUNING_FAMILY_OVER_GAMMA: [f64; 5] = [-70.0, -60.0, -50.0, 0.0, 10.0];
/// Intensity-vs-detuning curve family: drive powers in W.
pub const POWER_FAMILY: [f64; 3] = [0.3e-6, 3e-6, 7e-6];
/// Fixed drive for the hybrid detuning sweep (W).
pub const HYBRID_SWEEP_POWER: f64 = 20e-6;
/// Cooling horizon (units of 1/ω_m) and sample count.
pub const COOL_T_FINAL: f64 = 2000.0;
pub const COOL_SAMPLES: usize = 200;
/// Drive strength of the single-cavity comparison run, in units of ω_m.
pub const SINGLE_CAVITY_G: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Intracavity intensity vs cavity detuning, single cavity, three powers.
    Fig2a,
    /// Power hysteresis, single cavity, Δ_A = ω_m.
    Fig2b,
    /// Intensity vs cavity detuning, hybrid, atomic-detuning family.
    Fig3a,
    /// Power hysteresis, hybrid, atomic-detuning family.
    Fig3b,
    /// Threshold-power map over (Δ_at/γ_at, k_C/ω_m).
    Fig4,
    /// Phonon-number cooling trajectory, hybrid vs single cavity.
    Fig5,
}

pub const ALL: [Preset; 6] = [
    Preset::Fig2a,
    Preset::Fig2b,
    Preset::Fig3a,
    Preset::Fig3b,
    Preset::Fig4,
    Preset::Fig5,
];

impl Preset {
    pub fn parse(name: &str) -> Result<Self, String> {
        match name {
            "fig2a" => Ok(Preset::Fig2a),
            "fig2b" => Ok(Preset::Fig2b),
            "fig3a" => Ok(Preset::Fig3a),
            "fig3b" => Ok(Preset::Fig3b),
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            other => Err(format!(
                "unknown preset `{other}`; expected one of fig2a, fig2b, fig3a, fig3b, fig4, fig5"
            )),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
        }
    }

    /// SI parameter set; `None` for the cooling preset, which is specified
    /// dimensionlessly.
    pub fn physical(self, convention: FreqConvention) -> Option<PhysicalParams> {
        match self {
            Preset::Fig2a | Preset::Fig2b => Some(single_cavity(convention)),
            Preset::Fig3a | Preset::Fig3b | Preset::Fig4 => Some(hybrid(convention)),
            Preset::Fig5 => None,
        }
    }

    /// Per-curve parameter variations: `(varied SI value, params)`. The label
    /// is the drive power for the multi-power panel and the atomic detuning
    /// for the hybrid family; single-curve presets vary nothing.
    pub fn curve_family(self, base: &PhysicalParams) -> Vec<(Option<f64>, PhysicalParams)> {
        match self {
            Preset::Fig2a => POWER_FAMILY
                .iter()
                .map(|&p| {
                    (
                        Some(p),
                        PhysicalParams {
                            input_power: p,
                            ..base.clone()
                        },
                    )
                })
                .collect(),
            Preset::Fig3a | Preset::Fig3b => DETUNING_FAMILY_OVER_GAMMA
                .iter()
                .map(|&x| {
                    let delta_at = x * base.atom_decay;
                    (
                        Some(delta_at),
                        PhysicalParams {
                            atom_detuning: delta_at,
                            ..base.clone()
                        },
                    )
                })
                .collect(),
            _ => vec![(None, base.clone())],
        }
    }
}

/// Single optomechanical cavity: L = 1 mm, m = 10 ng, λ = 794.98 nm,
/// ω_m = 10 MHz, k_A = 0.1ω_m, Q = 10⁷, detuned to Δ_A = ω_m and driven at
/// the highest of the preset powers.
pub fn single_cavity(convention: FreqConvention) -> PhysicalParams {
    let omega_m = convention.angular(1e7);
    PhysicalParams {
        cavity_length: 1e-3,
        mirror_mass: 1e-11,
        laser_wavelength: 794.98e-9,
        mech_freq: omega_m,
        mech_damping: MechDamping::Quality(1e7),
        optical_decay_a: 0.1 * omega_m,
        optical_decay_c: 0.0,
        detuning_a: omega_m,
        detuning_c: 0.0,
        atom_detuning: 0.0,
        atom_decay: 0.0,
        atom_coupling: 0.0,
        atom_number: 0.0,
        cavity_coupling: 0.0,
        input_power: *POWER_FAMILY.last().unwrap(),
    }
}

/// Hybrid system: the single cavity plus a feedback cavity with J = ω_m,
/// k_C = 0.1ω_m, Δ_C = ω_m holding N = 10⁸ atoms with g_at = 2π kHz,
/// γ_at = 2π × 2.875 MHz (explicit-2π values are angular in both
/// conventions), Δ_at = 0, driven at 20 μW.
pub fn hybrid(convention: FreqConvention) -> PhysicalParams {
    let omega_m = convention.angular(1e7);
    PhysicalParams {
        optical_decay_c: 0.1 * omega_m,
        detuning_c: omega_m,
        atom_decay: core::f64::consts::TAU * 2.875e6,
        atom_coupling: core::f64::consts::TAU * 1e3,
        atom_number: 1e8,
        cavity_coupling: omega_m,
        input_power: HYBRID_SWEEP_POWER,
        ..single_cavity(convention)
    }
}

/// Hybrid cooling set in units of ω_m: k_A = 100 (unresolved sideband),
/// k_C = 1, γ_at = 1000, γ_m = 1e-5, g_at = 0.1, J = 200, G = 50,
/// Δ = Δ_at/100 = ω_m, n_th = 10⁴.
///
/// The feedback-cavity detuning sits at −ω_m: at +ω_m the drift matrix is
/// linearly unstable (spectral abscissa +6.3e-4·ω_m) and no steady state
/// exists, while the red-detuned feedback cavity is contractive
/// (abscissa −6.3e-4·ω_m) and cools. Flag-controlled runs can still evolve
/// other sign choices through a config document.
pub fn cooling() -> LinearizedParams {
    LinearizedParams {
        delta: 1.0,
        delta_c: -1.0,
        delta_at: 100.0,
        omega_m: 1.0,
        k_a: 100.0,
        k_c: 1.0,
        gamma_at: 1000.0,
        gamma_m: 1e-5,
        g_at: 0.1,
        j: 200.0,
        g: 50.0,
        n_th: 1e4,
    }
}

/// Threshold-map axes: Δ_at/γ_at linear over [−100, 20] (61 points),
/// k_C/ω_m log-spaced over [0.01, 1] (25 points).
pub fn map_axes() -> (Vec<f64>, Vec<f64>) {
    let deltas = (0..61).map(|i| -100.0 + 2.0 * i as f64).collect();
    let ks = (0..25)
        .map(|i| 10f64.powf(-2.0 + 2.0 * i as f64 / 24.0))
        .collect();
    (deltas, ks)
}
