//! JSON run configuration. Scalar keys mirror the physical parameter field
//! names in SI units; the `cooling` section carries the dimensionless
//! linearized set (rates and detunings in units of ω_m). Validation reports
//! every missing key at once, not just the first.

use std::fmt;
use std::path::Path;

use optomech::cooling::{DissipatorConvention, LinearizedParams};
use optomech::params::{FreqConvention, MechDamping, PhysicalParams};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "lower")]
pub enum ConventionName {
    Angular,
    Ordinary,
}

impl From<ConventionName> for FreqConvention {
    fn from(c: ConventionName) -> Self {
        match c {
            ConventionName::Angular => FreqConvention::Angular,
            ConventionName::Ordinary => FreqConvention::Ordinary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DissipatorName {
    Langevin,
    MasterEquation,
}

impl From<DissipatorName> for DissipatorConvention {
    fn from(d: DissipatorName) -> Self {
        match d {
            DissipatorName::Langevin => DissipatorConvention::Langevin,
            DissipatorName::MasterEquation => DissipatorConvention::MasterEquation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "lower")]
pub enum DirectionName {
    Up,
    Down,
    Both,
}

/// Sweep overrides: control range (W for power sweeps, rad/s for detuning
/// sweeps), grid size, and hysteresis direction.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub range: Option<[f64; 2]>,
    pub points: Option<usize>,
    pub direction: Option<DirectionName>,
}

/// Threshold-map axes.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    pub delta_at_over_gamma: Option<Vec<f64>>,
    pub k_c_over_omega_m: Option<Vec<f64>>,
}

/// Dimensionless linearized parameters plus integration controls.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolingSection {
    pub delta: Option<f64>,
    pub delta_c: Option<f64>,
    pub delta_at: Option<f64>,
    /// Unit carrier; defaults to 1 (everything is expressed in ω_m).
    pub omega_m: Option<f64>,
    pub k_a: Option<f64>,
    pub k_c: Option<f64>,
    pub gamma_at: Option<f64>,
    pub gamma_m: Option<f64>,
    pub g_at: Option<f64>,
    pub j: Option<f64>,
    pub g: Option<f64>,
    pub n_th: Option<f64>,
    pub t_final: Option<f64>,
    pub samples: Option<usize>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub cavity_length: Option<f64>,
    pub mirror_mass: Option<f64>,
    pub laser_wavelength: Option<f64>,
    pub mech_freq: Option<f64>,
    /// Quality factor; exactly one of this and `gamma_m`.
    pub mech_quality: Option<f64>,
    pub gamma_m: Option<f64>,
    pub optical_decay_a: Option<f64>,
    pub optical_decay_c: Option<f64>,
    pub detuning_a: Option<f64>,
    pub detuning_c: Option<f64>,
    pub atom_detuning: Option<f64>,
    pub atom_decay: Option<f64>,
    pub atom_coupling: Option<f64>,
    pub atom_number: Option<f64>,
    pub cavity_coupling: Option<f64>,
    pub input_power: Option<f64>,
    pub freq_convention: Option<ConventionName>,
    pub dissipator_convention: Option<DissipatorName>,
    pub sweep: Option<SweepSection>,
    pub map: Option<MapSection>,
    pub cooling: Option<CoolingSection>,
}

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse(serde_json::Error),
    /// Required keys absent for the requested command.
    Missing(Vec<&'static str>),
    Conflict(&'static str),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "config not readable: {e}"),
            ConfigError::Parse(e) => write!(f, "config not valid JSON: {e}"),
            ConfigError::Missing(fields) => {
                write!(f, "missing required config fields: {}", fields.join(", "))
            }
            ConfigError::Conflict(msg) => write!(f, "{msg}"),
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
        serde_json::from_str(&text).map_err(ConfigError::Parse)
    }

    /// Full SI parameter set, or the complete list of absent keys.
    pub fn physical(&self) -> Result<PhysicalParams, ConfigError> {
        let mut missing: Vec<&'static str> = Vec::new();
        let mut need = |name: &'static str, v: Option<f64>| {
            if v.is_none() {
                missing.push(name);
            }
            v.unwrap_or(f64::NAN)
        };
        let cavity_length = need("cavity_length", self.cavity_length);
        let mirror_mass = need("mirror_mass", self.mirror_mass);
        let laser_wavelength = need("laser_wavelength", self.laser_wavelength);
        let mech_freq = need("mech_freq", self.mech_freq);
        let optical_decay_a = need("optical_decay_a", self.optical_decay_a);
        let optical_decay_c = need("optical_decay_c", self.optical_decay_c);
        let detuning_a = need("detuning_a", self.detuning_a);
        let detuning_c = need("detuning_c", self.detuning_c);
        let atom_detuning = need("atom_detuning", self.atom_detuning);
        let atom_decay = need("atom_decay", self.atom_decay);
        let atom_coupling = need("atom_coupling", self.atom_coupling);
        let atom_number = need("atom_number", self.atom_number);
        let cavity_coupling = need("cavity_coupling", self.cavity_coupling);
        let input_power = need("input_power", self.input_power);
        let mech_damping = match (self.mech_quality, self.gamma_m) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Conflict(
                    "mech_quality and gamma_m are mutually exclusive",
                ))
            }
            (Some(q), None) => MechDamping::Quality(q),
            (None, Some(g)) => MechDamping::Rate(g),
            (None, None) => {
                missing.push("mech_quality|gamma_m");
                MechDamping::Quality(f64::NAN)
            }
        };
        if !missing.is_empty() {
            return Err(ConfigError::Missing(missing));
        }
        Ok(PhysicalParams {
            cavity_length,
            mirror_mass,
            laser_wavelength,
            mech_freq,
            mech_damping,
            optical_decay_a,
            optical_decay_c,
            detuning_a,
            detuning_c,
            atom_detuning,
            atom_decay,
            atom_coupling,
            atom_number,
            cavity_coupling,
            input_power,
        })
    }

    /// Dimensionless linearized set, or the complete list of absent keys.
    pub fn linearized(&self) -> Result<LinearizedParams, ConfigError> {
        let section = self.cooling.as_ref();
        let mut missing: Vec<&'static str> = Vec::new();
        let mut need = |name: &'static str, v: Option<f64>| {
            if v.is_none() {
                missing.push(name);
            }
            v.unwrap_or(f64::NAN)
        };
        let get = |f: fn(&CoolingSection) -> Option<f64>| section.and_then(f);
        let p = LinearizedParams {
            delta: need("cooling.delta", get(|c| c.delta)),
            delta_c: need("cooling.delta_c", get(|c| c.delta_c)),
            delta_at: need("cooling.delta_at", get(|c| c.delta_at)),
            omega_m: get(|c| c.omega_m).unwrap_or(1.0),
            k_a: need("cooling.k_a", get(|c| c.k_a)),
            k_c: need("cooling.k_c", get(|c| c.k_c)),
            gamma_at: need("cooling.gamma_at", get(|c| c.gamma_at)),
            gamma_m: need("cooling.gamma_m", get(|c| c.gamma_m)),
            g_at: need("cooling.g_at", get(|c| c.g_at)),
            j: need("cooling.j", get(|c| c.j)),
            g: need("cooling.g", get(|c| c.g)),
            n_th: need("cooling.n_th", get(|c| c.n_th)),
        };
        if missing.is_empty() {
            Ok(p)
        } else {
            Err(ConfigError::Missing(missing))
        }
    }

    pub fn dissipator(&self) -> DissipatorConvention {
        self.dissipator_convention
            .map(Into::into)
            .unwrap_or_default()
    }
}
