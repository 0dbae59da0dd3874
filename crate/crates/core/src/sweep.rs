//! Parameter sweeps over the steady-state solution: detuning scans of the
//! multivalued S-curve, power hysteresis sweeps with branch continuation and
//! jump detection, and a 2-D threshold-power map over the atomic detuning and
//! feedback-cavity decay.
//!
//! Power sweeps follow one stable branch quasi-statically: at each step the
//! continuation is the stable root closest in log-photon-number to the
//! previous one, restricted to the same side of the unstable middle branch.
//! When that side empties out (a fold), the trace jumps to the surviving
//! stable root and the jump location is refined by bisecting on the root
//! count between the bracketing grid points, so detected jump powers are
//! grid-independent.

use alloc::vec::Vec;

use crate::bistability::{self, RootBranch, SteadyStateSolution};
use crate::params::{self, EffectiveCavityResponse, PhysicalParams};
use crate::{Error, Result};

/// Default grid density for sweeps.
pub const DEFAULT_SWEEP_POINTS: usize = 2000;

/// Relative tolerance (in the control variable) for bisection refinement of
/// jump locations.
const JUMP_REFINE_REL: f64 = 1e-4;

/// Traversal direction of a power sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Control increases; the trace starts on the lowest stable branch.
    Up,
    /// Control decreases; the trace starts on the highest stable branch.
    Down,
}

impl Direction {
    /// Lowercase name for serialization.
    pub fn label(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

/// One sweep grid point: the full root set and the branch being followed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSample {
    /// The control variable at this sample (Δ_A in rad/s, or P in W).
    pub control_value: f64,
    /// All steady-state branches here, ascending in n.
    pub roots: Vec<RootBranch>,
    /// Photon number of the followed branch; always one of `roots` and
    /// labeled stable.
    pub followed_n: f64,
}

/// A discontinuous branch change at a fold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    /// Refined control value of the fold (same units as the sweep control).
    pub control_value: f64,
    /// Photon number of the vanishing branch at the fold.
    pub from_n: f64,
    /// Photon number of the surviving branch landed on.
    pub to_n: f64,
}

/// An ordered sweep over one control variable.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTrace {
    /// Which control was swept: `"detuning_A"` or `"power"`.
    pub control_name: &'static str,
    /// Traversal direction; `None` for detuning sweeps (no branch
    /// continuation — the full S-curve is reported at every point).
    pub direction: Option<Direction>,
    /// Samples in traversal order.
    pub samples: Vec<SweepSample>,
    /// Folds crossed, in traversal order.
    pub jump_events: Vec<JumpEvent>,
    /// χ² of the swept parameter set, so traces can be displayed as the
    /// scaled mirror displacement χQ_S = χ²·n.
    pub chi_sq: f64,
}

/// 2-D map of bistability threshold power over (Δ_at, k_C).
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdMap {
    /// Row axis: atomic detuning in units of γ_at.
    pub delta_at_over_gamma: Vec<f64>,
    /// Column axis: feedback-cavity decay in units of ω_m.
    pub k_c_over_omega_m: Vec<f64>,
    /// `cells[i][j]` is the threshold power (W) at `delta_at_over_gamma[i]`,
    /// `k_c_over_omega_m[j]`, or `None` where the cell is not bistable.
    pub cells: Vec<Vec<Option<f64>>>,
}

/// Which side of the unstable middle branch the followed root sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BranchClass {
    Lower,
    Upper,
    /// The sample has a single branch (no middle root).
    Only,
}

fn check_grid(range: (f64, f64), n_points: usize, name: &'static str) -> Result<()> {
    if !(range.0.is_finite() && range.1.is_finite() && range.0 < range.1) {
        return Err(Error::InvalidParameter {
            name,
            value: range.1 - range.0,
            requirement: "finite range with lower bound strictly below upper",
        });
    }
    if n_points < 2 {
        return Err(Error::InvalidParameter {
            name: "n_points",
            value: n_points as f64,
            requirement: ">= 2",
        });
    }
    Ok(())
}

fn linspace(range: (f64, f64), n_points: usize) -> impl Iterator<Item = f64> {
    let (lo, hi) = range;
    let step = (hi - lo) / (n_points - 1) as f64;
    (0..n_points).map(move |i| if i == n_points - 1 { hi } else { lo + step * i as f64 })
}

fn log_distance(a: f64, b: f64) -> f64 {
    // Photon numbers span decades; 0 is floored so the zero-drive root
    // still matches itself.
    libm::fabs(libm::log(a.max(1e-300)) - libm::log(b.max(1e-300)))
}

/// The unstable middle root, or for a fold-degenerate two-root sample the
/// flattest root (the merging pair's representative).
fn middle_root(sol: &SteadyStateSolution, resp: &EffectiveCavityResponse, c: f64) -> Option<f64> {
    match sol.roots.len() {
        3 => Some(sol.roots[1].n),
        2 => {
            let slope = |n: f64| {
                let det = resp.delta_new - c * n;
                resp.k_new * resp.k_new + det * det - 2.0 * c * n * det
            };
            let s0 = libm::fabs(slope(sol.roots[0].n));
            let s1 = libm::fabs(slope(sol.roots[1].n));
            Some(if s0 <= s1 { sol.roots[0].n } else { sol.roots[1].n })
        }
        _ => None,
    }
}

fn closest_stable(sol: &SteadyStateSolution, target: f64) -> Option<&RootBranch> {
    sol.stable_roots().min_by(|a, b| {
        log_distance(a.n, target).total_cmp(&log_distance(b.n, target))
    })
}

/// Stable roots on `class`'s side of the middle root `m` (fold roots sit on
/// the boundary and belong to both sides).
fn closest_stable_in_class(
    sol: &SteadyStateSolution,
    target: f64,
    m: f64,
    class: BranchClass,
) -> Option<&RootBranch> {
    sol.stable_roots()
        .filter(|r| match class {
            BranchClass::Lower => r.n <= m,
            BranchClass::Upper => r.n >= m,
            BranchClass::Only => true,
        })
        .min_by(|a, b| log_distance(a.n, target).total_cmp(&log_distance(b.n, target)))
}

fn classify(n: f64, middle: Option<f64>, previous: BranchClass) -> BranchClass {
    match middle {
        None => BranchClass::Only,
        Some(m) => {
            if n < m {
                BranchClass::Lower
            } else if n > m {
                BranchClass::Upper
            } else {
                // Exactly on the fold: keep the side we came from.
                previous
            }
        }
    }
}

/// Full S-curve scan over the optomechanical cavity detuning Δ_A.
///
/// No branch continuation: every sample reports all roots, and the followed
/// branch is the lowest stable one. The trace's `chi_sq` turns photon numbers
/// into the scaled displacement view χQ_S = χ²·n.
pub fn detuning_sweep(
    params: &PhysicalParams,
    delta_a_range: (f64, f64),
    n_points: usize,
) -> Result<SweepTrace> {
    params.validate()?;
    check_grid(delta_a_range, n_points, "delta_a_range")?;
    let chi = params::scaled_coupling(params)?;
    let eps_a = params::drive_amplitude(params)?;

    let mut samples = Vec::with_capacity(n_points);
    for delta_a in linspace(delta_a_range, n_points) {
        let p = PhysicalParams {
            detuning_a: delta_a,
            ..params.clone()
        };
        let resp = params::effective_response(&p)?;
        let sol = bistability::steady_state_roots(&resp, chi, p.mech_freq, eps_a)?;
        let followed = closest_stable(&sol, 0.0).map(|r| r.n).unwrap_or(0.0);
        samples.push(SweepSample {
            control_value: delta_a,
            roots: sol.roots,
            followed_n: followed,
        });
    }
    Ok(SweepTrace {
        control_name: "detuning_A",
        direction: None,
        samples,
        jump_events: Vec::new(),
        chi_sq: chi * chi,
    })
}

/// Quasi-static hysteresis sweep over input power.
///
/// Follows one stable branch per the continuation rule in the module docs;
/// fold crossings produce `jump_events` with bisection-refined powers.
pub fn power_sweep(
    params: &PhysicalParams,
    power_range: (f64, f64),
    n_points: usize,
    direction: Direction,
) -> Result<SweepTrace> {
    params.validate()?;
    check_grid(power_range, n_points, "power_range")?;
    if power_range.0 < 0.0 {
        return Err(Error::InvalidParameter {
            name: "power_range",
            value: power_range.0,
            requirement: ">= 0",
        });
    }
    let chi = params::scaled_coupling(params)?;
    let resp = params::effective_response(params)?;
    let omega_m = params.mech_freq;
    let c = omega_m * chi * chi;
    let solve = |power: f64| -> Result<SteadyStateSolution> {
        let eps = libm::sqrt(params.power_to_drive_sq(power));
        bistability::steady_state_roots(&resp, chi, omega_m, eps)
    };

    let mut grid: Vec<f64> = linspace(power_range, n_points).collect();
    if direction == Direction::Down {
        grid.reverse();
    }

    let mut samples: Vec<SweepSample> = Vec::with_capacity(n_points);
    let mut jumps: Vec<JumpEvent> = Vec::new();

    // First sample: lowest (up) / highest (down) stable root.
    let first = solve(grid[0])?;
    let start = match direction {
        Direction::Up => first.stable_roots().next(),
        Direction::Down => first.stable_roots().last(),
    }
    .expect("the lowest and highest roots of the steady-state cubic are stable");
    let mut followed = start.n;
    let mut middle = middle_root(&first, &resp, c);
    let mut class = classify(followed, middle, BranchClass::Only);
    let mut count = first.roots.len();
    samples.push(SweepSample {
        control_value: grid[0],
        roots: first.roots,
        followed_n: followed,
    });

    for &power in &grid[1..] {
        let sol = solve(power)?;
        let new_middle = middle_root(&sol, &resp, c);
        let prev_control = samples.last().map(|s| s.control_value).unwrap_or(power);

        let (chosen, jumped) = match (class, new_middle) {
            (BranchClass::Only, _) => {
                // Single branch so far: entering a window keeps continuity.
                (closest_stable(&sol, followed), false)
            }
            (cls, Some(m)) => match closest_stable_in_class(&sol, followed, m, cls) {
                Some(r) => (Some(r), false),
                // Our side of the S-curve vanished without the sample losing
                // its middle root: still a fold crossing.
                None => (closest_stable(&sol, followed), true),
            },
            (cls, None) => {
                let r = closest_stable(&sol, followed);
                let crossed = match (r, middle, cls) {
                    (Some(r), Some(m), BranchClass::Lower) => r.n > m,
                    (Some(r), Some(m), BranchClass::Upper) => r.n < m,
                    _ => false,
                };
                (r, crossed)
            }
        };
        let chosen = chosen
            .expect("every steady-state solution has at least one stable root")
            .n;

        if jumped {
            debug_assert_ne!(count, sol.roots.len());
            jumps.push(refine_jump(
                &solve,
                prev_control,
                power,
                count,
                followed,
                chosen,
            )?);
        }

        class = classify(chosen, new_middle, class);
        followed = chosen;
        middle = new_middle;
        count = sol.roots.len();
        samples.push(SweepSample {
            control_value: power,
            roots: sol.roots,
            followed_n: followed,
        });
    }

    Ok(SweepTrace {
        control_name: "power",
        direction: Some(direction),
        samples,
        jump_events: jumps,
        chi_sq: chi * chi,
    })
}

/// Bisects the fold location between the last pre-jump control and the first
/// post-jump control, on the root count, to `JUMP_REFINE_REL` in the control.
fn refine_jump(
    solve: &impl Fn(f64) -> Result<SteadyStateSolution>,
    control_before: f64,
    control_after: f64,
    count_before: usize,
    followed_before: f64,
    followed_after: f64,
) -> Result<JumpEvent> {
    let mut old_side = control_before;
    let mut new_side = control_after;
    while libm::fabs(new_side - old_side)
        > JUMP_REFINE_REL * libm::fabs(old_side).max(libm::fabs(new_side))
    {
        let mid = 0.5 * (old_side + new_side);
        if mid == old_side || mid == new_side {
            break;
        }
        if solve(mid)?.roots.len() == count_before {
            old_side = mid;
        } else {
            new_side = mid;
        }
    }
    let from_n = closest_stable(&solve(old_side)?, followed_before)
        .map(|r| r.n)
        .unwrap_or(followed_before);
    let to_n = closest_stable(&solve(new_side)?, followed_after)
        .map(|r| r.n)
        .unwrap_or(followed_after);
    Ok(JumpEvent {
        control_value: 0.5 * (old_side + new_side),
        from_n,
        to_n,
    })
}

/// Threshold power over a grid of atomic detunings (units of γ_at) and
/// feedback-cavity decays (units of ω_m). Cells are evaluated independently;
/// non-bistable cells are `None`.
pub fn threshold_map(
    params: &PhysicalParams,
    delta_at_over_gamma: &[f64],
    k_c_over_omega_m: &[f64],
) -> Result<ThresholdMap> {
    params.validate()?;
    if delta_at_over_gamma.is_empty() || k_c_over_omega_m.is_empty() {
        return Err(Error::InvalidParameter {
            name: "map_axes",
            value: 0.0,
            requirement: "both axes non-empty",
        });
    }
    for &k in k_c_over_omega_m {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter {
                name: "k_c_over_omega_m",
                value: k,
                requirement: "finite and > 0",
            });
        }
    }
    for &d in delta_at_over_gamma {
        if !d.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta_at_over_gamma",
                value: d,
                requirement: "finite",
            });
        }
    }

    let mut cells = Vec::with_capacity(delta_at_over_gamma.len());
    for &d in delta_at_over_gamma {
        let mut row = Vec::with_capacity(k_c_over_omega_m.len());
        for &k in k_c_over_omega_m {
            let cell = PhysicalParams {
                atom_detuning: d * params.atom_decay,
                optical_decay_c: k * params.mech_freq,
                ..params.clone()
            };
            row.push(match bistability::threshold_power(&cell) {
                Ok((p_th, _)) => Some(p_th),
                Err(Error::NotBistable) => None,
                Err(e) => return Err(e),
            });
        }
        cells.push(row);
    }
    Ok(ThresholdMap {
        delta_at_over_gamma: delta_at_over_gamma.into(),
        k_c_over_omega_m: k_c_over_omega_m.into(),
        cells,
    })
}
