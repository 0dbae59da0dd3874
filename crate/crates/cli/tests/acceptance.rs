//! End-to-end acceptance gate, one test per advertised capability. Each test
//! prints a single `ACCEPTANCE <n> PASS — …` line on success, so a captured
//! log shows the whole gate at a glance. Expensive cooling trajectories are
//! integrated once and shared between the two tests that grade them.

use std::sync::OnceLock;

use optomech::bistability::{
    bistable_window, is_bistable, steady_state_roots, threshold_power,
};
use optomech::cooling::{
    build_linearized_system, evolve_moments, steady_state_moments, DtControl, Mode, MomentState,
    Trajectory,
};
use optomech::params::{
    drive_amplitude, effective_response, scaled_coupling, FreqConvention, MechDamping,
    PhysicalParams,
};
use optomech::sweep::{power_sweep, detuning_sweep, threshold_map, Direction};
use optomech_cli::presets;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo.log10()..hi.log10()))
}

fn signed_log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    sign * log_uniform(rng, lo, hi)
}

fn random_hybrid(rng: &mut ChaCha8Rng) -> PhysicalParams {
    let w = 1e7;
    PhysicalParams {
        cavity_length: 1e-3,
        mirror_mass: 1e-11,
        laser_wavelength: 794.98e-9,
        mech_freq: w,
        mech_damping: MechDamping::Quality(log_uniform(rng, 1e3, 1e7)),
        optical_decay_a: w * log_uniform(rng, 1e-2, 1e1),
        optical_decay_c: w * log_uniform(rng, 1e-2, 1e1),
        detuning_a: w * signed_log_uniform(rng, 1e-2, 1e1),
        detuning_c: w * signed_log_uniform(rng, 1e-2, 1e1),
        atom_detuning: w * signed_log_uniform(rng, 1e-2, 1e3),
        atom_decay: w * log_uniform(rng, 1e-2, 1e3),
        atom_coupling: w * log_uniform(rng, 1e-5, 1.0),
        atom_number: log_uniform(rng, 1.0, 1e9),
        cavity_coupling: w * log_uniform(rng, 1e-2, 1e2),
        input_power: 1e-6,
    }
}

/// Bistability predicate agrees with a dense-scan oracle — some drive power
/// yields three distinct positive roots iff the drive curve E(n) decreases
/// somewhere on n > 0 — on 1000 random hybrid draws, zero disagreements.
#[test]
fn criterion_1_bistability_predicate_matches_dense_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0001);
    let mut checked = 0usize;
    let mut bistable_seen = 0usize;
    let mut attempts = 0usize;
    while checked < 1000 {
        attempts += 1;
        assert!(attempts < 4000, "draw rejection runaway");
        let p = random_hybrid(&mut rng);
        let r = effective_response(&p).unwrap();
        let (k, delta) = (r.k_new, r.delta_new);
        // Knife-edge margins sit below the scan's resolution; redraw there.
        let margin = delta * delta - 3.0 * k * k;
        if margin.abs() < 1e-6 * (delta * delta + 3.0 * k * k) {
            continue;
        }
        let predicted = is_bistable(&r);

        let chi = scaled_coupling(&p).unwrap();
        let c = p.mech_freq * chi * chi;
        let scale = (delta.abs() + k) / c;
        let m = 4000;
        let ratio = (1e4f64).powf(1.0 / m as f64);
        let mut n = 1e-3 * scale;
        let drive_at = |n: f64| {
            let d = delta - c * n;
            n * (k * k + d * d)
        };
        let mut prev = drive_at(n);
        let mut dips = false;
        for _ in 0..m {
            n *= ratio;
            let e = drive_at(n);
            if e < prev {
                dips = true;
                break;
            }
            prev = e;
        }
        assert_eq!(predicted, dips, "k={k} delta={delta} margin={margin}");
        if predicted {
            bistable_seen += 1;
        }
        checked += 1;
    }
    assert!(bistable_seen >= 50, "only {bistable_seen} bistable draws");
    println!(
        "ACCEPTANCE 1 PASS — predicate matched the dense-scan oracle on 1000 draws \
         ({bistable_seen} bistable), zero disagreements"
    );
}

/// Largest input power carrying three branches, found with the cubic solver
/// alone: log-grid scan into the three-root window, then bisection on the
/// root count across the upper fold. No turning-point algebra involved.
fn brute_force_upper_fold(p: &PhysicalParams) -> f64 {
    let chi = scaled_coupling(p).unwrap();
    let resp = effective_response(p).unwrap();
    let count = |power: f64| {
        let q = PhysicalParams {
            input_power: power,
            ..p.clone()
        };
        let eps = drive_amplitude(&q).unwrap();
        steady_state_roots(&resp, chi, p.mech_freq, eps)
            .unwrap()
            .roots
            .len()
    };
    let m = 4000;
    let mut lo = f64::NAN;
    for i in 0..=m {
        let power = 1e-9 * (1e9f64).powf(i as f64 / m as f64);
        if count(power) == 3 {
            lo = power;
            break;
        }
    }
    assert!(lo.is_finite(), "no three-root power in [1e-9, 1] W");
    let mut hi = lo;
    while count(hi) == 3 {
        hi *= 1.25;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if count(mid) == 3 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form threshold power equals the brute-force upper fold to 1e-6
/// relative under both frequency conventions; the angular reading is the one
/// that lands within 10% of the 31.9 μW calibration target.
#[test]
fn criterion_2_threshold_calibration_under_both_conventions() {
    let mut report = Vec::new();
    for conv in [FreqConvention::Angular, FreqConvention::Ordinary] {
        let p = presets::single_cavity(conv);
        let (p_th, _) = threshold_power(&p).unwrap();
        let brute = brute_force_upper_fold(&p);
        assert!(
            (p_th - brute).abs() <= 1e-6 * p_th,
            "{}: closed form {p_th} vs fold {brute}",
            conv.label()
        );
        let within = (p_th - 31.9e-6).abs() <= 0.1 * 31.9e-6;
        match conv {
            FreqConvention::Angular => assert!(within, "angular {p_th} off target"),
            FreqConvention::Ordinary => assert!(!within, "ordinary {p_th} on target"),
        }
        report.push(format!("{} {:.4e} W", conv.label(), p_th));
    }
    println!(
        "ACCEPTANCE 2 PASS — closed form matches brute-force fold to 1e-6 under both \
         conventions; angular lands within 10% of 31.9 μW ({})",
        report.join(", ")
    );
}

/// Detuning interval carrying three roots at fixed power: `None` when the
/// sweep is single-valued everywhere, else (lower, upper) edge in rad/s.
fn three_root_interval(p: &PhysicalParams, power: f64) -> Option<(f64, f64)> {
    let q = PhysicalParams {
        input_power: power,
        ..p.clone()
    };
    let trace = detuning_sweep(&q, (0.0, 2.0 * q.mech_freq), presets::SWEEP_POINTS).unwrap();
    let multi: Vec<f64> = trace
        .samples
        .iter()
        .filter(|s| s.roots.len() == 3)
        .map(|s| s.control_value)
        .collect();
    multi.first().map(|&lo| (lo, *multi.last().unwrap()))
}

/// Fixed-power detuning sweeps: 0.3 μW is single-valued over [0, 2ω_m], 7 μW
/// carries a nonempty three-root interval, and the interval's upper edge
/// moves to larger detuning between 3 μW and 7 μW.
#[test]
fn criterion_3_detuning_regimes_and_edge_growth() {
    let p = presets::single_cavity(FreqConvention::Angular);
    let step = 2.0 * p.mech_freq / (presets::SWEEP_POINTS - 1) as f64;
    assert!(
        three_root_interval(&p, 0.3e-6).is_none(),
        "0.3 μW is not single-valued"
    );
    let (_, hi3) = three_root_interval(&p, 3e-6).expect("3 μW three-root interval");
    let (_, hi7) = three_root_interval(&p, 7e-6).expect("7 μW three-root interval");
    assert!(
        hi7 > hi3 + step,
        "upper edge did not grow: {hi3} → {hi7} rad/s"
    );
    println!(
        "ACCEPTANCE 3 PASS — 0.3 μW single-valued; three-root upper edge grows \
         {:.4}ω_m → {:.4}ω_m from 3 μW to 7 μW",
        hi3 / p.mech_freq,
        hi7 / p.mech_freq
    );
}

/// The bistability predicate across atomic detuning flips within 10% of
/// −60γ_at on the hybrid parameter set.
#[test]
fn criterion_4_atomic_detuning_flip_point() {
    let p = presets::hybrid(FreqConvention::Angular);
    let gamma = p.atom_decay;
    let bistable_at = |x: f64| {
        let q = PhysicalParams {
            atom_detuning: x * gamma,
            ..p.clone()
        };
        is_bistable(&effective_response(&q).unwrap())
    };
    assert!(!bistable_at(-70.0), "bistable at −70γ_at");
    assert!(bistable_at(-50.0), "not bistable at −50γ_at");
    let (mut lo, mut hi) = (-70.0, -50.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bistable_at(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let flip = 0.5 * (lo + hi);
    assert!(
        (flip - (-60.0)).abs() <= 6.0,
        "flip at {flip}γ_at, outside −60γ_at ± 10%"
    );
    println!("ACCEPTANCE 4 PASS — predicate flips at {flip:.4}γ_at (target −60γ_at ± 10%)");
}

/// Threshold-power map over red atomic detunings: P_th is non-increasing as
/// k_C decreases along every detuning row where bistability holds, and some
/// red-detuned cell undercuts the single-cavity threshold.
#[test]
fn criterion_5_threshold_map_trends() {
    let base = presets::hybrid(FreqConvention::Angular);
    let deltas: Vec<f64> = (0..10).map(|i| -100.0 + 10.0 * i as f64).collect();
    let ks = presets::map_axes().1;
    let map = threshold_map(&base, &deltas, &ks).unwrap();
    let (p_single, _) =
        threshold_power(&presets::single_cavity(FreqConvention::Angular)).unwrap();

    let mut cells = 0usize;
    let mut undercut: Option<(f64, f64, f64)> = None;
    for (i, row) in map.cells.iter().enumerate() {
        // Ascending k_C, so non-increasing toward smaller k_C means
        // non-decreasing along the stored row.
        let mut prev: Option<f64> = None;
        for (j, cell) in row.iter().enumerate() {
            let Some(p_th) = *cell else { continue };
            cells += 1;
            if let Some(prev) = prev {
                assert!(
                    prev <= p_th * (1.0 + 1e-12),
                    "P_th rose toward smaller k_C at Δ_at={}γ_at, k_C={}ω_m",
                    map.delta_at_over_gamma[i],
                    map.k_c_over_omega_m[j]
                );
            }
            prev = Some(p_th);
            if map.delta_at_over_gamma[i] < 0.0 && p_th < p_single && undercut.is_none() {
                undercut = Some((map.delta_at_over_gamma[i], map.k_c_over_omega_m[j], p_th));
            }
        }
    }
    assert!(cells >= 20, "only {cells} bistable cells on the map");
    let (d, k, p_th) = undercut.expect("no red-detuned cell under the single-cavity threshold");
    println!(
        "ACCEPTANCE 5 PASS — monotone in k_C on every bistable row ({cells} cells); \
         Δ_at={d}γ_at, k_C={k:.3}ω_m gives {p_th:.4e} W < single-cavity {p_single:.4e} W"
    );
}

/// Up/down power sweeps jump at the fold powers: one jump each, upward jump
/// above the downward one, both matching the bistable window edges to 1e-3
/// relative.
#[test]
fn criterion_6_hysteresis_jump_powers() {
    let p = presets::single_cavity(FreqConvention::Angular);
    let up = power_sweep(&p, presets::POWER_RANGE, presets::SWEEP_POINTS, Direction::Up).unwrap();
    let down =
        power_sweep(&p, presets::POWER_RANGE, presets::SWEEP_POINTS, Direction::Down).unwrap();
    assert_eq!(up.jump_events.len(), 1, "up-sweep jumps");
    assert_eq!(down.jump_events.len(), 1, "down-sweep jumps");
    let (p_low, p_high) = bistable_window(&p).unwrap();
    let p1 = up.jump_events[0].control_value;
    let p2 = down.jump_events[0].control_value;
    assert!(p1 > p2, "no hysteresis: up {p1} vs down {p2}");
    assert!((p1 - p_high).abs() <= 1e-3 * p_high, "up jump {p1} vs {p_high}");
    assert!((p2 - p_low).abs() <= 1e-3 * p_low, "down jump {p2} vs {p_low}");
    assert!(up.jump_events[0].to_n > up.jump_events[0].from_n);
    assert!(down.jump_events[0].to_n < down.jump_events[0].from_n);
    println!(
        "ACCEPTANCE 6 PASS — single jump per direction at P₁={:.4e} W > P₂={:.4e} W, \
         matching the window edges to 1e-3"
    , p1, p2);
}

/// Phonon steady state of the hybrid cooling run, frozen once from the
/// algebraic Lyapunov solution.
const LYAPUNOV_N_B: f64 = 197.88487057995073;
const N_TH: f64 = 1e4;

struct CoolingRuns {
    /// Hybrid system over the plotted window t ∈ [0, 2000]/ω_m.
    window: Trajectory,
    /// Same window with the feedback cavity removed and G = 0.1ω_m.
    window_single: Trajectory,
    /// Hybrid system out to t = 12000/ω_m, past the slowest transient.
    converge: Trajectory,
    /// Lyapunov steady state of the hybrid system.
    lyap: MomentState,
}

static COOLING_RUNS: OnceLock<CoolingRuns> = OnceLock::new();

fn cooling_runs() -> &'static CoolingRuns {
    COOLING_RUNS.get_or_init(|| {
        let p = presets::cooling();
        let sys = build_linearized_system(&p);
        let mut ps = p;
        ps.j = 0.0;
        ps.g = presets::SINGLE_CAVITY_G * ps.omega_m;
        let sys_single = build_linearized_system(&ps);
        let init = MomentState::thermal_mechanical(N_TH);
        let window_ctrl = DtControl {
            rtol: 1e-5,
            ..DtControl::default()
        };
        let converge_ctrl = DtControl {
            rtol: 1e-4,
            samples: 2,
            ..DtControl::default()
        };
        CoolingRuns {
            window: evolve_moments(&sys, &init, 2000.0, &window_ctrl).unwrap(),
            window_single: evolve_moments(&sys_single, &init, 2000.0, &window_ctrl).unwrap(),
            converge: evolve_moments(&sys, &init, 12_000.0, &converge_ctrl).unwrap(),
            lyap: steady_state_moments(&sys).unwrap(),
        }
    })
}

/// Hybrid cooling pulls n_b from 10⁴ below 0.5·10⁴ inside the plotted
/// window and converges to the Lyapunov fixture at long times; the
/// single-cavity run barely moves from 10⁴.
#[test]
fn criterion_7_cooling_window_and_fixture() {
    let runs = cooling_runs();
    let nb: Vec<(f64, f64)> = runs.window.phonon_history().collect();
    assert_eq!(nb[0].1, N_TH, "initial phonon number");
    let crossing = nb
        .iter()
        .find(|(_, n)| *n < 0.5 * N_TH)
        .expect("n_b never fell below 0.5e4 in the window");

    let lyap_nb = runs.lyap.occupancy(Mode::Mirror);
    assert!(
        (lyap_nb - LYAPUNOV_N_B).abs() <= 1e-9 * LYAPUNOV_N_B,
        "Lyapunov n_b {lyap_nb} drifted from the fixture"
    );
    let final_nb = runs.converge.states.last().unwrap().occupancy(Mode::Mirror);
    assert!(
        (final_nb - LYAPUNOV_N_B).abs() <= 1e-4 * LYAPUNOV_N_B,
        "trajectory end {final_nb} vs fixture {LYAPUNOV_N_B}"
    );

    for (t, n) in runs.window_single.phonon_history() {
        assert!(
            (n - N_TH).abs() <= 0.1 * N_TH,
            "single-cavity n_b strayed to {n} at t={t}"
        );
    }
    println!(
        "ACCEPTANCE 7 PASS — n_b crosses 0.5e4 at t={:.0}/ω_m, long run ends at {:.4} \
         (fixture {:.4}, 1e-4 rel), single-cavity stays within 10% of 1e4",
        crossing.0, final_nb, LYAPUNOV_N_B
    );
}

/// Moment-dynamics invariants on the shared runs: bounded Hermiticity drift,
/// no negative occupancies, the ODE holds the Lyapunov point to 1e-6, and
/// uncoupled thermal/vacuum modes are exact fixed points.
#[test]
fn criterion_8_moment_invariants() {
    let runs = cooling_runs();
    let drift_cap = 1e-8 * (1.0 + N_TH);
    for (name, traj) in [
        ("window", &runs.window),
        ("single", &runs.window_single),
        ("converge", &runs.converge),
    ] {
        assert!(
            traj.max_hermiticity_drift < drift_cap,
            "{name}: drift {}",
            traj.max_hermiticity_drift
        );
        for s in &traj.states {
            for mode in [Mode::CavityA, Mode::Mirror, Mode::CavityC, Mode::Atom] {
                let n = s.occupancy(mode);
                assert!(n >= -1e-6, "{name}: {mode:?} occupancy {n} at t={}", s.t);
            }
        }
    }

    // Started on the Lyapunov point, the integrator must hold every matrix
    // entry there: |ΔS_ij| ≤ 1e-6·(floor + |S_ij|) with an absolute floor
    // well under one phonon.
    let p = presets::cooling();
    let sys = build_linearized_system(&p);
    let mut start = runs.lyap.clone();
    start.t = 0.0;
    let held = evolve_moments(&sys, &start, 200.0, &DtControl::default()).unwrap();
    let end = held.states.last().unwrap();
    let floor = 1e-9 * (1.0 + N_TH);
    for i in 0..8 {
        for j in 0..8 {
            let want = runs.lyap.second[(i, j)];
            let got = end.second[(i, j)];
            assert!(
                (got - want).norm() <= 1e-6 * (floor + want.norm()),
                "S[{i},{j}] moved: {got} vs {want}"
            );
        }
    }

    // Fully uncoupled system: the thermal mirror and vacuum optical/atomic
    // modes are exact fixed points — bit-frozen samples, zero error estimate.
    let mut pu = presets::cooling();
    pu.g = 0.0;
    pu.j = 0.0;
    pu.g_at = 0.0;
    let trivial = evolve_moments(
        &build_linearized_system(&pu),
        &MomentState::thermal_mechanical(N_TH),
        500.0,
        &DtControl::default(),
    )
    .unwrap();
    assert_eq!(trivial.error_estimate, 0.0);
    for s in &trivial.states {
        assert_eq!(s.occupancy(Mode::Mirror), N_TH);
        assert_eq!(s.occupancy(Mode::CavityA), 0.0);
        assert_eq!(s.occupancy(Mode::CavityC), 0.0);
        assert_eq!(s.occupancy(Mode::Atom), 0.0);
    }
    println!(
        "ACCEPTANCE 8 PASS — drift < 1e-8·(1+n_th), occupancies ≥ −1e-6, Lyapunov point \
         held to 1e-6, uncoupled thermal/vacuum fixed points exact"
    );
}
