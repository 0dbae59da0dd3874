//! Argument parsing and subcommand dispatch. `execute` is pure given the
//! filesystem reads it performs: it returns the rendered output document or
//! a typed error carrying the process exit code (2 validation, 3 numerical).

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use optomech::bistability::{
    bistability_margin, bistable_window, steady_state_roots, threshold_power,
    SteadyStateSolution,
};
use optomech::cooling::{
    build_linearized_system_with, evolve_moments, steady_state_moments, DtControl, Mode,
    MomentState,
};
use optomech::params::{
    atomic_cavity_steady_state, drive_amplitude, effective_response, scaled_coupling,
    FreqConvention, PhysicalParams,
};
use optomech::sweep::{detuning_sweep, power_sweep, threshold_map, Direction, SweepTrace};
use optomech::Complex64;
use serde_json::json;

use crate::config::{ConfigError, ConventionName, DirectionName, FileConfig};
use crate::output;
use crate::presets::{self, Preset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Cmd {
    /// Derived quantities (χ, ε_A, γ_m, effective response) as JSON.
    Derive,
    /// Steady-state photon-number branches at the configured drive, as JSON.
    SteadyState,
    /// Threshold power and fold window, as JSON.
    Threshold,
    /// Root branches vs cavity detuning, as CSV.
    SweepDetuning,
    /// Quasi-static hysteresis vs input power, as CSV.
    SweepPower,
    /// Threshold power over the (Δ_at/γ_at, k_C/ω_m) grid, as CSV.
    ThresholdMap,
    /// Phonon-number trajectory (or `--steady-state` occupancies) of the
    /// linearized moment system.
    Cool,
}

/// Steady states, bistability, and cooling dynamics of a hybrid
/// atom-optomechanical cavity system.
#[derive(Debug, Parser)]
#[command(name = "optomech", version)]
pub struct Cli {
    /// What to compute; defaults to the preset's natural output.
    #[arg(value_enum)]
    pub command: Option<Cmd>,
    /// JSON parameter document (SI-unit keys mirroring the field names).
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in parameter set: fig2a, fig2b, fig3a, fig3b, fig4, fig5.
    #[arg(long)]
    pub preset: Option<String>,
    /// How quoted frequencies expand to rad/s (explicit-2π values are fixed).
    #[arg(long)]
    pub freq_convention: Option<ConventionName>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sweep control range (W for power, rad/s for detuning).
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    pub range: Option<Vec<f64>>,
    /// Sweep grid size.
    #[arg(long)]
    pub points: Option<usize>,
    /// Hysteresis direction for power sweeps.
    #[arg(long)]
    pub direction: Option<DirectionName>,
    /// Cooling horizon in units of 1/ω_m.
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Cooling trajectory sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Cooling integrator relative tolerance.
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Cooling: drop the feedback cavity (J = 0) and weaken the
    /// optomechanical drive to G = 0.1ω_m.
    #[arg(long)]
    pub single_cavity: bool,
    /// Cooling: print the steady-state occupancies instead of a trajectory.
    #[arg(long)]
    pub steady_state: bool,
}

/// Failure carrying the process exit code: 2 for input/validation problems,
/// 3 for numerical ones.
#[derive(Debug)]
pub struct AppError {
    pub exit: u8,
    pub kind: &'static str,
    pub message: String,
    pub fields: Vec<String>,
}

impl AppError {
    fn validation(kind: &'static str, message: impl Into<String>) -> Self {
        AppError {
            exit: 2,
            kind,
            message: message.into(),
            fields: Vec::new(),
        }
    }

    pub fn io(e: std::io::Error) -> Self {
        AppError {
            exit: 3,
            kind: "io",
            message: e.to_string(),
            fields: Vec::new(),
        }
    }

    /// Machine-readable error report for the diagnostic stream.
    pub fn to_json(&self) -> String {
        let mut body = json!({"kind": self.kind, "message": self.message});
        if !self.fields.is_empty() {
            body["fields"] = json!(self.fields);
        }
        json!({ "error": body }).to_string()
    }
}

impl From<optomech::Error> for AppError {
    fn from(e: optomech::Error) -> Self {
        let (exit, kind, fields) = match &e {
            optomech::Error::InvalidParameter { name, .. } => {
                (2, "invalid_parameter", vec![name.to_string()])
            }
            optomech::Error::SingularResponse { .. } => (3, "singular_response", vec![]),
            optomech::Error::NotBistable => (3, "not_bistable", vec![]),
            optomech::Error::UnstableDrift { .. } => (3, "unstable_drift", vec![]),
            optomech::Error::IntegrationFailure { .. } => (3, "integration_failure", vec![]),
        };
        AppError {
            exit,
            kind,
            message: e.to_string(),
            fields,
        }
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        let (kind, fields) = match &e {
            ConfigError::Io(_) => ("config_io", vec![]),
            ConfigError::Parse(_) => ("config_parse", vec![]),
            ConfigError::Missing(fields) => (
                "missing_fields",
                fields.iter().map(|s| s.to_string()).collect(),
            ),
            ConfigError::Conflict(_) => ("config_conflict", vec![]),
        };
        AppError {
            exit: 2,
            kind,
            message: e.to_string(),
            fields,
        }
    }
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!({"re": z.re, "im": z.im})
}

/// Runs the resolved command and renders its output document.
pub fn execute(cli: &Cli) -> Result<String, AppError> {
    let config = match &cli.config {
        Some(path) => Some(FileConfig::load(path)?),
        None => None,
    };
    let preset = match &cli.preset {
        Some(name) => Some(
            Preset::parse(name).map_err(|m| AppError::validation("unknown_preset", m))?,
        ),
        None => None,
    };
    let convention: FreqConvention = cli
        .freq_convention
        .or(config.as_ref().and_then(|c| c.freq_convention))
        .map(Into::into)
        .unwrap_or_default();
    let command = cli.command.or(preset.map(natural_command)).ok_or_else(|| {
        AppError::validation(
            "no_command",
            "nothing to run: pass a subcommand or --preset",
        )
    })?;

    match command {
        Cmd::Derive => derive(physical(preset, config.as_ref(), convention)?, convention),
        Cmd::SteadyState => {
            steady_state(physical(preset, config.as_ref(), convention)?, convention)
        }
        Cmd::Threshold => threshold(physical(preset, config.as_ref(), convention)?, convention),
        Cmd::SweepDetuning => sweep_detuning_cmd(cli, config.as_ref(), preset, convention),
        Cmd::SweepPower => sweep_power_cmd(cli, config.as_ref(), preset, convention),
        Cmd::ThresholdMap => threshold_map_cmd(config.as_ref(), preset, convention),
        Cmd::Cool => cool_cmd(cli, config.as_ref(), preset),
    }
}

fn natural_command(preset: Preset) -> Cmd {
    match preset {
        Preset::Fig2a | Preset::Fig3a => Cmd::SweepDetuning,
        Preset::Fig2b | Preset::Fig3b => Cmd::SweepPower,
        Preset::Fig4 => Cmd::ThresholdMap,
        Preset::Fig5 => Cmd::Cool,
    }
}

/// Base SI parameters from the preset or the config document.
fn physical(
    preset: Option<Preset>,
    config: Option<&FileConfig>,
    convention: FreqConvention,
) -> Result<PhysicalParams, AppError> {
    if let Some(p) = preset {
        return p.physical(convention).ok_or_else(|| {
            AppError::validation(
                "preset_kind",
                "this preset provides cooling parameters; run `cool` with it",
            )
        });
    }
    match config {
        Some(c) => Ok(c.physical()?),
        None => Err(AppError::validation(
            "no_parameters",
            "parameters required: pass --preset or --config",
        )),
    }
}

fn derive(p: PhysicalParams, convention: FreqConvention) -> Result<String, AppError> {
    let chi = scaled_coupling(&p)?;
    let eps = drive_amplitude(&p)?;
    let resp = effective_response(&p)?;
    let (c_s, sigma12) = atomic_cavity_steady_state(&p, Complex64::new(1.0, 0.0))?;
    Ok(render_json(&json!({
        "convention": convention.label(),
        "chi": chi,
        "drive_amplitude": eps,
        "gamma_m": p.gamma_m(),
        "omega_laser": p.omega_laser(),
        "response": {
            "a1": resp.a1,
            "a2": resp.a2,
            "k_new": resp.k_new,
            "delta_new": resp.delta_new,
        },
        "atomic_steady_state_unit_field": {
            "c_s": complex_json(c_s),
            "sigma12": complex_json(sigma12),
        },
    })))
}

fn steady_state(p: PhysicalParams, convention: FreqConvention) -> Result<String, AppError> {
    let chi = scaled_coupling(&p)?;
    let eps = drive_amplitude(&p)?;
    let resp = effective_response(&p)?;
    let sol = steady_state_roots(&resp, chi, p.mech_freq, eps)?;
    let roots: Vec<_> = sol
        .roots
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "stable": r.stable,
                "a_s": complex_json(r.a_s),
                "q_s": r.q_s,
                "p_s": SteadyStateSolution::MIRROR_MOMENTUM,
                "residual": r.residual,
            })
        })
        .collect();
    Ok(render_json(&json!({
        "convention": convention.label(),
        "chi": chi,
        "drive_sq": sol.drive_sq,
        "roots": roots,
    })))
}

fn threshold(p: PhysicalParams, convention: FreqConvention) -> Result<String, AppError> {
    let (p_th, n_th) = threshold_power(&p)?;
    let (p_low, p_high) = bistable_window(&p)?;
    let margin = bistability_margin(&effective_response(&p)?);
    Ok(render_json(&json!({
        "convention": convention.label(),
        "bistable": true,
        "p_th_watts": p_th,
        "n_th": n_th,
        "window": {"p_low_watts": p_low, "p_high_watts": p_high},
        "margin": margin,
    })))
}

/// Curves to sweep: the preset's family, else the base parameters alone.
fn curves(
    preset: Option<Preset>,
    base: &PhysicalParams,
) -> Vec<(Option<f64>, PhysicalParams)> {
    match preset {
        Some(p) => p.curve_family(base),
        None => vec![(None, base.clone())],
    }
}

fn resolve_range(cli: &Cli, config: Option<&FileConfig>) -> Option<(f64, f64)> {
    if let Some(r) = &cli.range {
        return Some((r[0], r[1]));
    }
    config
        .and_then(|c| c.sweep.as_ref())
        .and_then(|s| s.range)
        .map(|[lo, hi]| (lo, hi))
}

fn resolve_points(cli: &Cli, config: Option<&FileConfig>) -> usize {
    cli.points
        .or(config.and_then(|c| c.sweep.as_ref()).and_then(|s| s.points))
        .unwrap_or(presets::SWEEP_POINTS)
}

fn sweep_detuning_cmd(
    cli: &Cli,
    config: Option<&FileConfig>,
    preset: Option<Preset>,
    convention: FreqConvention,
) -> Result<String, AppError> {
    let base = physical(preset, config, convention)?;
    let range = resolve_range(cli, config).unwrap_or((0.0, 2.0 * base.mech_freq));
    let points = resolve_points(cli, config);
    let mut traces: Vec<(Option<f64>, SweepTrace)> = Vec::new();
    for (label, p) in curves(preset, &base) {
        traces.push((label, detuning_sweep(&p, range, points)?));
    }
    Ok(output::sweep_csv(&traces))
}

fn sweep_power_cmd(
    cli: &Cli,
    config: Option<&FileConfig>,
    preset: Option<Preset>,
    convention: FreqConvention,
) -> Result<String, AppError> {
    let base = physical(preset, config, convention)?;
    let range = resolve_range(cli, config).unwrap_or(presets::POWER_RANGE);
    let points = resolve_points(cli, config);
    let directions = match cli
        .direction
        .or(config
            .and_then(|c| c.sweep.as_ref())
            .and_then(|s| s.direction))
        .unwrap_or(DirectionName::Both)
    {
        DirectionName::Up => vec![Direction::Up],
        DirectionName::Down => vec![Direction::Down],
        DirectionName::Both => vec![Direction::Up, Direction::Down],
    };
    let mut traces: Vec<(Option<f64>, SweepTrace)> = Vec::new();
    for (label, p) in curves(preset, &base) {
        for &d in &directions {
            traces.push((label, power_sweep(&p, range, points, d)?));
        }
    }
    Ok(output::sweep_csv(&traces))
}

fn threshold_map_cmd(
    config: Option<&FileConfig>,
    preset: Option<Preset>,
    convention: FreqConvention,
) -> Result<String, AppError> {
    let base = physical(preset, config, convention)?;
    let defaults = presets::map_axes();
    let section = config.and_then(|c| c.map.as_ref());
    let deltas = section
        .and_then(|m| m.delta_at_over_gamma.clone())
        .unwrap_or(defaults.0);
    let ks = section
        .and_then(|m| m.k_c_over_omega_m.clone())
        .unwrap_or(defaults.1);
    let map = threshold_map(&base, &deltas, &ks)?;
    Ok(output::map_csv(&map))
}

fn cool_cmd(
    cli: &Cli,
    config: Option<&FileConfig>,
    preset: Option<Preset>,
) -> Result<String, AppError> {
    let mut p = match preset {
        Some(Preset::Fig5) => presets::cooling(),
        Some(_) => {
            return Err(AppError::validation(
                "preset_kind",
                "this preset has no cooling parameters; use fig5 or a config with a `cooling` section",
            ))
        }
        None => match config {
            Some(c) => c.linearized()?,
            None => {
                return Err(AppError::validation(
                    "no_parameters",
                    "cooling parameters required: pass --preset fig5 or --config",
                ))
            }
        },
    };
    if cli.single_cavity {
        p.j = 0.0;
        p.g = presets::SINGLE_CAVITY_G * p.omega_m;
    }
    let sys = build_linearized_system_with(&p, config.map(|c| c.dissipator()).unwrap_or_default());

    if cli.steady_state {
        let ss = steady_state_moments(&sys)?;
        return Ok(render_json(&json!({
            "n_a": ss.occupancy(Mode::CavityA),
            "n_b": ss.occupancy(Mode::Mirror),
            "n_c": ss.occupancy(Mode::CavityC),
            "n_d": ss.occupancy(Mode::Atom),
        })));
    }

    let section = config.and_then(|c| c.cooling.as_ref());
    let t_final = cli
        .t_final
        .or(section.and_then(|s| s.t_final))
        .unwrap_or(presets::COOL_T_FINAL);
    let ctrl = DtControl {
        samples: cli
            .samples
            .or(section.and_then(|s| s.samples))
            .unwrap_or(presets::COOL_SAMPLES),
        rtol: cli
            .rtol
            .or(section.and_then(|s| s.rtol))
            .unwrap_or(DtControl::default().rtol),
        atol: section.and_then(|s| s.atol),
        ..DtControl::default()
    };
    let init = MomentState::thermal_mechanical(p.n_th);
    let traj = evolve_moments(&sys, &init, t_final, &ctrl)?;
    Ok(output::cool_csv(&traj))
}

fn render_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON render");
    s.push('\n');
    s
}
