//! Steady-state optical bistability of the driven optomechanical cavity.
//!
//! The intracavity photon number `n = |a_S|²` satisfies the cubic
//!
//! ```text
//! n·[k_new² + (Δ_new − ω_m·χ²·n)²] = |ε_A|²
//! ```
//!
//! Radiation pressure tilts the Lorentzian: above a threshold drive the
//! response folds into an S-curve with two stable branches and an unstable
//! middle branch. Turning points (folds), the bistability condition, and the
//! fold powers are all closed-form in `(k_new, Δ_new, ω_m·χ²)`.

use alloc::vec::Vec;
use libm::{fabs, sqrt};
use num_complex::Complex64;

use crate::cubic;
use crate::params::{self, EffectiveCavityResponse, PhysicalParams};
use crate::{Error, Result};

/// Roots closer than this (relative) are treated as one physical branch.
const DEDUP_REL: f64 = 1e-7;
/// Discriminant magnitudes below this (relative to Δ² + 3k²) count as the
/// degenerate fold onset.
const DEGENERATE_REL: f64 = 1e-12;

/// One steady-state branch at fixed drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBranch {
    /// Intracavity photon number n = |a_S|².
    pub n: f64,
    /// Static stability from the slope criterion sign(d|ε_A|²/dn); the middle
    /// branch of an S-curve is the unstable one.
    pub stable: bool,
    /// Steady cavity field a_S = ε_A/(k_new + i(Δ_new − ω_m·χ²·n)).
    pub a_s: Complex64,
    /// Steady mirror displacement Q_S = χ·n (dimensionless).
    pub q_s: f64,
    /// Relative residual of the cubic at this root.
    pub residual: f64,
}

/// All steady-state branches at one drive strength.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateSolution {
    /// 1–3 branches, ascending in n.
    pub roots: Vec<RootBranch>,
    /// The |ε_A|² this solution corresponds to (rad²/s²).
    pub drive_sq: f64,
}

impl SteadyStateSolution {
    /// Steady mirror momentum P_S; identically zero in the rotating steady
    /// state (the displacement is static).
    pub const MIRROR_MOMENTUM: f64 = 0.0;

    /// Branches labeled stable, ascending in n.
    pub fn stable_roots(&self) -> impl Iterator<Item = &RootBranch> {
        self.roots.iter().filter(|r| r.stable)
    }
}

/// Fold photon numbers n± where d|ε_A|²/dn = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints {
    /// Lower fold photon number (2Δ_new − √disc)/(3ω_mχ²); the branch-count
    /// change at the UPPER drive power happens here.
    pub n_minus: f64,
    /// Upper fold photon number (2Δ_new + √disc)/(3ω_mχ²).
    pub n_plus: f64,
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            requirement: "finite",
        })
    }
}

/// All non-negative real steady-state photon numbers at drive ε_A, with
/// stability labels, fields, and residuals.
///
/// Roots are deduplicated at 1e-7 relative and Newton-polished on the cubic.
pub fn steady_state_roots(
    resp: &EffectiveCavityResponse,
    chi: f64,
    omega_m: f64,
    eps_a: f64,
) -> Result<SteadyStateSolution> {
    check_finite("k_new", resp.k_new)?;
    check_finite("delta_new", resp.delta_new)?;
    if !(resp.k_new > 0.0) {
        return Err(Error::InvalidParameter {
            name: "k_new",
            value: resp.k_new,
            requirement: "> 0 (feedback-induced gain has no static steady state)",
        });
    }
    if !(chi >= 0.0) || !chi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "chi",
            value: chi,
            requirement: "finite and >= 0",
        });
    }
    if !(omega_m > 0.0) || !omega_m.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega_m",
            value: omega_m,
            requirement: "finite and > 0",
        });
    }
    if !(eps_a >= 0.0) || !eps_a.is_finite() {
        return Err(Error::InvalidParameter {
            name: "eps_a",
            value: eps_a,
            requirement: "finite and >= 0",
        });
    }

    let k = resp.k_new;
    let d = resp.delta_new;
    let c = omega_m * chi * chi;
    let e = eps_a * eps_a;
    check_finite("drive_sq", e)?;
    check_finite("omega_m * chi^2", c)?;

    let mut ns: Vec<f64> = if e == 0.0 {
        // n(c²n² − 2Δcn + k² + Δ²) = 0 has the single real root n = 0
        // (the quadratic factor's discriminant is −4c²k² < 0).
        alloc::vec![0.0]
    } else if c == 0.0 {
        // Linear cavity: plain Lorentzian response.
        alloc::vec![e / (k * k + d * d)]
    } else {
        cubic::real_roots(c * c, -2.0 * d * c, k * k + d * d, -e)
    };

    // With e > 0 every true root is strictly positive; drop numerical strays.
    ns.retain(|&n| n >= 0.0);
    for n in ns.iter_mut() {
        *n = polish_on_cubic(*n, k, d, c, e);
    }
    ns.sort_unstable_by(f64::total_cmp);

    // Deduplicate branches that collapsed together (fold degeneracies).
    let mut kept: Vec<f64> = Vec::with_capacity(ns.len());
    for n in ns {
        match kept.last() {
            Some(&prev) if fabs(n - prev) <= DEDUP_REL * fabs(n).max(fabs(prev)) => {
                // Keep whichever satisfies the cubic better.
                if fabs(cubic_residual(n, k, d, c, e)) < fabs(cubic_residual(prev, k, d, c, e)) {
                    *kept.last_mut().unwrap() = n;
                }
            }
            _ => kept.push(n),
        }
    }

    let denom = if e > 0.0 { e } else { 1.0 };
    let roots = kept
        .into_iter()
        .map(|n| {
            let slope = cubic_slope(n, k, d, c);
            let a_s = if e == 0.0 {
                Complex64::ZERO
            } else {
                Complex64::new(eps_a, 0.0) / Complex64::new(k, d - c * n)
            };
            RootBranch {
                n,
                stable: slope >= 0.0,
                a_s,
                q_s: chi * n,
                residual: fabs(cubic_residual(n, k, d, c, e)) / denom,
            }
        })
        .collect();
    Ok(SteadyStateSolution { roots, drive_sq: e })
}

/// f(n) = n·[k² + (Δ − cn)²] − E.
fn cubic_residual(n: f64, k: f64, d: f64, c: f64, e: f64) -> f64 {
    let det = d - c * n;
    n * (k * k + det * det) - e
}

/// f'(n) = k² + (Δ − cn)² − 2cn(Δ − cn); this is d|ε_A|²/dn.
fn cubic_slope(n: f64, k: f64, d: f64, c: f64) -> f64 {
    let det = d - c * n;
    k * k + det * det - 2.0 * c * n * det
}

fn polish_on_cubic(n0: f64, k: f64, d: f64, c: f64, e: f64) -> f64 {
    let mut n = n0;
    let mut f = cubic_residual(n, k, d, c, e);
    for _ in 0..2 {
        let df = cubic_slope(n, k, d, c);
        if df == 0.0 {
            break;
        }
        let next = n - f / df;
        let f_next = cubic_residual(next, k, d, c, e);
        if !next.is_finite() || fabs(f_next) > fabs(f) {
            break;
        }
        n = next;
        f = f_next;
    }
    n
}

/// Fold photon numbers, if the response curve folds at positive n.
///
/// Present iff Δ_new² − 3k_new² > 0 and Δ_new > 0; a discriminant within
/// 1e-12 (relative) of zero returns the degenerate double fold
/// n_minus = n_plus. χ = 0 never folds (empty, not an error).
pub fn turning_points(
    resp: &EffectiveCavityResponse,
    chi: f64,
    omega_m: f64,
) -> Result<Option<TurningPoints>> {
    check_finite("k_new", resp.k_new)?;
    check_finite("delta_new", resp.delta_new)?;
    if !(chi >= 0.0) || !chi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "chi",
            value: chi,
            requirement: "finite and >= 0",
        });
    }
    if !(omega_m > 0.0) || !omega_m.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega_m",
            value: omega_m,
            requirement: "finite and > 0",
        });
    }
    let c = omega_m * chi * chi;
    if c == 0.0 || resp.delta_new <= 0.0 {
        return Ok(None);
    }
    let k = resp.k_new;
    let d = resp.delta_new;
    let disc = d * d - 3.0 * k * k;
    let scale = d * d + 3.0 * k * k;
    if disc <= -DEGENERATE_REL * scale {
        return Ok(None);
    }
    if fabs(disc) <= DEGENERATE_REL * scale {
        let n = 2.0 * d / (3.0 * c);
        return Ok(Some(TurningPoints {
            n_minus: n,
            n_plus: n,
        }));
    }
    let root = sqrt(disc);
    Ok(Some(TurningPoints {
        n_minus: (2.0 * d - root) / (3.0 * c),
        n_plus: (2.0 * d + root) / (3.0 * c),
    }))
}

/// Compact bistability margin Δ_new² − 3k_new²; bistable iff this is positive
/// AND Δ_new > 0.
pub fn bistability_margin(resp: &EffectiveCavityResponse) -> f64 {
    resp.delta_new * resp.delta_new - 3.0 * resp.k_new * resp.k_new
}

/// The same margin evaluated in raw parameters, without forming
/// (k_new, Δ_new) first:
///
/// ```text
/// Δ_A² − 3k_A²
///   + J⁴·[(Δ_at·A1 − γ_at·A2)² − 3(γ_at·A1 + Δ_at·A2)²]/(A1² + A2²)²
///   + 2J²·[Δ_A·(Δ_at·A1 − γ_at·A2) − 3k_A·(γ_at·A1 + Δ_at·A2)]/(A1² + A2²)
/// ```
///
/// Algebraically identical to [`bistability_margin`]; kept as an independent
/// cross-check of the response algebra.
pub fn bistability_margin_expanded(params: &PhysicalParams) -> Result<f64> {
    let resp = params::effective_response(params)?;
    let k_a = params.optical_decay_a;
    let d_a = params.detuning_a;
    let j = params.cavity_coupling;
    let bare = d_a * d_a - 3.0 * k_a * k_a;
    if j == 0.0 {
        return Ok(bare);
    }
    let den = resp.a1 * resp.a1 + resp.a2 * resp.a2;
    let x = params.atom_detuning * resp.a1 - params.atom_decay * resp.a2;
    let y = params.atom_decay * resp.a1 + params.atom_detuning * resp.a2;
    let j2 = j * j;
    Ok(bare + j2 * j2 * (x * x - 3.0 * y * y) / (den * den)
        + 2.0 * j2 * (d_a * x - 3.0 * k_a * y) / den)
}

/// Whether some drive power produces three distinct positive steady states.
pub fn is_bistable(resp: &EffectiveCavityResponse) -> bool {
    resp.delta_new > 0.0 && bistability_margin(resp) > 0.0
}

/// Threshold drive |ε_A|²_th and threshold photon number n_th (the upper fold
/// of the S-curve), in the dimensionful units of the inputs.
pub fn threshold_drive_sq(
    resp: &EffectiveCavityResponse,
    chi: f64,
    omega_m: f64,
) -> Result<(f64, f64)> {
    // Fold existence is the effective gate: it matches is_bistable everywhere
    // except the degenerate onset band, where the threshold is still the
    // (unique) fold power.
    let folds = turning_points(resp, chi, omega_m)?.ok_or(Error::NotBistable)?;
    let n_th = folds.n_minus;
    let e_th = cubic_residual(n_th, resp.k_new, resp.delta_new, omega_m * chi * chi, 0.0);
    Ok((e_th, n_th))
}

/// Drive-squared window (E_low, E_high): the cubic has three distinct
/// positive roots exactly for |ε_A|² strictly inside, one root outside.
pub fn window_drive_sq(
    resp: &EffectiveCavityResponse,
    chi: f64,
    omega_m: f64,
) -> Result<(f64, f64)> {
    let folds = turning_points(resp, chi, omega_m)?.ok_or(Error::NotBistable)?;
    let c = omega_m * chi * chi;
    let e_high = cubic_residual(folds.n_minus, resp.k_new, resp.delta_new, c, 0.0);
    let e_low = cubic_residual(folds.n_plus, resp.k_new, resp.delta_new, c, 0.0);
    Ok((e_low, e_high))
}

/// Threshold input power P_th (W) and threshold photon number for the full
/// parameter set: the drive at which the upper fold sits.
pub fn threshold_power(params: &PhysicalParams) -> Result<(f64, f64)> {
    let resp = params::effective_response(params)?;
    let chi = params::scaled_coupling(params)?;
    let (e_th, n_th) = threshold_drive_sq(&resp, chi, params.mech_freq)?;
    Ok((params.drive_sq_to_power(e_th), n_th))
}

/// Fold powers (P_low, P_high) in W: three steady states exist exactly for
/// input power strictly inside the window. P_high equals `threshold_power`.
pub fn bistable_window(params: &PhysicalParams) -> Result<(f64, f64)> {
    let resp = params::effective_response(params)?;
    let chi = params::scaled_coupling(params)?;
    let (e_low, e_high) = window_drive_sq(&resp, chi, params.mech_freq)?;
    Ok((
        params.drive_sq_to_power(e_low),
        params.drive_sq_to_power(e_high),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{
        effective_response, scaled_coupling, MechDamping, PhysicalParams,
    };
    use approx::assert_relative_eq;

    fn resp(k_new: f64, delta_new: f64) -> EffectiveCavityResponse {
        EffectiveCavityResponse {
            a1: 0.0,
            a2: 0.0,
            k_new,
            delta_new,
        }
    }

    fn fig2_params(power: f64) -> PhysicalParams {
        PhysicalParams {
            cavity_length: 1e-3,
            mirror_mass: 1e-11,
            laser_wavelength: 794.98e-9,
            mech_freq: 1e7,
            mech_damping: MechDamping::Quality(1e5),
            optical_decay_a: 1e6,
            optical_decay_c: 1e6,
            detuning_a: 1e7,
            detuning_c: 1e7,
            atom_detuning: 0.0,
            atom_decay: 2.875e6 * core::f64::consts::TAU,
            atom_coupling: 1e3 * core::f64::consts::TAU,
            atom_number: 1e8,
            cavity_coupling: 0.0,
            input_power: power,
        }
    }

    #[test]
    fn zero_drive_single_zero_root() {
        let sol = steady_state_roots(&resp(0.1, 1.0), 1.0, 1.0, 0.0).unwrap();
        assert_eq!(sol.roots.len(), 1);
        assert_eq!(sol.roots[0].n, 0.0);
        assert!(sol.roots[0].stable);
        assert_eq!(sol.roots[0].a_s, Complex64::ZERO);
    }

    #[test]
    fn zero_coupling_is_lorentzian() {
        let sol = steady_state_roots(&resp(0.1, 1.0), 0.0, 1.0, 0.5).unwrap();
        assert_eq!(sol.roots.len(), 1);
        assert_relative_eq!(sol.roots[0].n, 0.25 / 1.01, max_relative = 1e-12);
        assert!(sol.roots[0].stable);
    }

    #[test]
    fn dimensionless_three_roots() {
        let sol = steady_state_roots(&resp(0.1, 1.0), 1.0, 1.0, libm::sqrt(0.05)).unwrap();
        assert_eq!(sol.roots.len(), 3);
        assert_relative_eq!(sol.roots[0].n, 0.055417914983127, max_relative = 1e-9);
        assert_relative_eq!(sol.roots[1].n, 0.764650593637512, max_relative = 1e-9);
        assert_relative_eq!(sol.roots[2].n, 1.179931491379361, max_relative = 1e-9);
        assert!(sol.roots[0].stable);
        assert!(!sol.roots[1].stable);
        assert!(sol.roots[2].stable);
        for r in &sol.roots {
            assert!(r.residual <= 1e-9, "residual {}", r.residual);
            assert_relative_eq!(r.a_s.norm_sqr(), r.n, max_relative = 1e-9);
            assert_relative_eq!(r.q_s, r.n, max_relative = 1e-12);
        }
    }

    #[test]
    fn fig2_drive_has_three_roots() {
        let p = fig2_params(7e-6);
        let resp = effective_response(&p).unwrap();
        let chi = scaled_coupling(&p).unwrap();
        let eps = crate::params::drive_amplitude(&p).unwrap();
        let sol = steady_state_roots(&resp, chi, p.mech_freq, eps).unwrap();
        assert_eq!(sol.roots.len(), 3);
        assert_relative_eq!(sol.roots[0].n, 5.95590589e5, max_relative = 1e-6);
        assert_relative_eq!(sol.roots[1].n, 1.3957875e7, max_relative = 1e-6);
        assert_relative_eq!(sol.roots[2].n, 1.9226959e7, max_relative = 1e-6);
        for r in &sol.roots {
            assert!(r.residual <= 1e-9);
            assert_relative_eq!(r.a_s.norm_sqr(), r.n, max_relative = 1e-9);
        }
    }

    #[test]
    fn turning_point_arithmetic() {
        // Δ = 2k, ω_mχ² = 1 → disc = k², folds at {k, 5k/3}.
        let k = 0.3;
        let tp = turning_points(&resp(k, 2.0 * k), 1.0, 1.0).unwrap().unwrap();
        assert_relative_eq!(tp.n_minus, k, max_relative = 1e-12);
        assert_relative_eq!(tp.n_plus, 5.0 * k / 3.0, max_relative = 1e-12);

        // Degenerate onset Δ = √3·k.
        let d = libm::sqrt(3.0) * k;
        let tp = turning_points(&resp(k, d), 1.0, 1.0).unwrap().unwrap();
        assert_relative_eq!(tp.n_minus, tp.n_plus, max_relative = 1e-9);
        assert_relative_eq!(tp.n_minus, 2.0 * d / 3.0, max_relative = 1e-6);

        // Weakly detuned: no folds.
        assert!(turning_points(&resp(0.1, 0.1), 1.0, 1.0).unwrap().is_none());
        // χ = 0: empty, not an error.
        assert!(turning_points(&resp(0.1, 1.0), 0.0, 1.0).unwrap().is_none());
        // Red-side detuning: folds would sit at negative n.
        assert!(turning_points(&resp(0.1, -1.0), 1.0, 1.0).unwrap().is_none());
    }

    #[test]
    fn bistability_predicate() {
        assert!(is_bistable(&resp(0.1, 1.0)));
        assert!(!is_bistable(&resp(0.1, 0.1)));
        assert!(!is_bistable(&resp(0.1, -1.0)));
    }

    #[test]
    fn margin_forms_agree_on_hybrid_set() {
        let mut p = fig2_params(7e-6);
        p.cavity_coupling = 1e7;
        for delta_at_over_gamma in [-80.0, -60.0, -40.0, 0.0, 15.0] {
            p.atom_detuning = delta_at_over_gamma * p.atom_decay;
            let r = effective_response(&p).unwrap();
            let compact = bistability_margin(&r);
            let expanded = bistability_margin_expanded(&p).unwrap();
            assert_relative_eq!(compact, expanded, max_relative = 1e-9);
        }
    }

    #[test]
    fn dimensionless_threshold_and_window() {
        let r = resp(0.1, 1.0);
        let (e_th, n_th) = threshold_drive_sq(&r, 1.0, 1.0).unwrap();
        let expect_n = (2.0 - libm::sqrt(0.97)) / 3.0;
        assert_relative_eq!(n_th, expect_n, max_relative = 1e-12);
        assert_relative_eq!(e_th, 0.151506607909, max_relative = 1e-9);
        let (e_low, e_high) = window_drive_sq(&r, 1.0, 1.0).unwrap();
        assert_relative_eq!(e_low, 0.009974873572, max_relative = 1e-9);
        assert_relative_eq!(e_high, e_th, max_relative = 1e-15);

        // Root count flips across the window edges.
        let roots_at = |e2: f64| {
            steady_state_roots(&r, 1.0, 1.0, libm::sqrt(e2))
                .unwrap()
                .roots
                .len()
        };
        assert_eq!(roots_at(e_low * 0.99), 1);
        assert_eq!(roots_at(e_low * 1.01), 3);
        assert_eq!(roots_at(e_high * 0.99), 3);
        assert_eq!(roots_at(e_high * 1.01), 1);
    }

    #[test]
    fn degenerate_onset_has_zero_width_window() {
        let k = 0.2;
        let r = resp(k, libm::sqrt(3.0) * k);
        let (e_low, e_high) = window_drive_sq(&r, 1.0, 1.0).unwrap();
        assert_relative_eq!(e_low, e_high, max_relative = 1e-9);
        let (e_th, _) = threshold_drive_sq(&r, 1.0, 1.0).unwrap();
        assert_relative_eq!(e_th, e_high, max_relative = 1e-12);
    }

    #[test]
    fn threshold_power_fixture() {
        let p = fig2_params(7e-6);
        let (p_th, n_th) = threshold_power(&p).unwrap();
        assert_relative_eq!(p_th, 3.197107290063598e-5, max_relative = 1e-9);
        assert_relative_eq!(n_th, 5.715164906120246e6, max_relative = 1e-9);
        let (p_low, p_high) = bistable_window(&p).unwrap();
        assert_relative_eq!(p_high, p_th, max_relative = 1e-12);
        assert_relative_eq!(p_low, 2.1049075981234303e-6, max_relative = 1e-9);
    }

    #[test]
    fn not_bistable_errors() {
        let mut p = fig2_params(7e-6);
        p.detuning_a = 0.0;
        assert!(matches!(threshold_power(&p), Err(Error::NotBistable)));
        assert!(matches!(bistable_window(&p), Err(Error::NotBistable)));
    }

    #[test]
    fn gain_response_rejected() {
        let sol = steady_state_roots(&resp(-0.1, 1.0), 1.0, 1.0, 0.1);
        assert!(matches!(sol, Err(Error::InvalidParameter { name: "k_new", .. })));
    }
}
