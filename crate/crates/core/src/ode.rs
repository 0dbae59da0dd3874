//! Adaptive stiff integrator for the linear moment flow dS/dt = M S + S M† + D.
//!
//! An L-stable second-order Rosenbrock step handles rate spreads up to ~1e8;
//! the local error is measured by step doubling (one full step against two
//! half steps), which stays honest even when the flow's eigenbasis is badly
//! conditioned — embedded stage combinations lose the cancellation structure
//! there and over-report by orders of magnitude. The stage equations need
//! (I − hγ L)⁻¹ applied to matrices, where L(X) = M X + X M†; with the
//! complex Schur form M = Q T Q† computed once per run, each application is a
//! triangular Sylvester solve — no 64×64 factorization ever, and step-size
//! (and half-step) changes are free.
//!
//! Exact steady states are exact fixed points of the scheme (every stage is a
//! W-solve of a vanishing right-hand side), so long-horizon terminal values
//! are governed by the flow, not by the tolerance; tolerances shape transient
//! fidelity.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{schur_8, CMat8};
use crate::{Error, IntegrationFailureReason, Result};

/// Rosenbrock damping parameter 1/(2 + √2); the scheme is L-stable with it.
const GAMMA: f64 = 1.0 / (2.0 + core::f64::consts::SQRT_2);

/// Error-controlled step sizing.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub initial_dt: Option<f64>,
}

/// Accumulated run diagnostics.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct RunStats {
    /// Accepted steps.
    pub steps: usize,
    /// Largest |S − S†| entry seen before re-Hermitization.
    pub max_hermiticity_drift: f64,
    /// Sum over accepted steps of the step-doubling error estimate on the
    /// ⟨b†b⟩ entry; a (pessimistic) bound on the tolerance-limited part of
    /// the phonon number's global error.
    pub error_estimate_bb: f64,
}

/// The constant-coefficient moment flow with its Schur data.
pub(crate) struct MomentFlow {
    m: CMat8,
    m_dag: CMat8,
    d: CMat8,
    q: CMat8,
    q_dag: CMat8,
    t: CMat8,
}

enum Attempt {
    Accepted { err_norm: f64, err_bb: f64 },
    TooLarge { err_norm: f64 },
    /// W was (near-)singular or the candidate state went non-finite.
    Broken { non_finite: bool },
}

impl MomentFlow {
    pub(crate) fn new(m: CMat8, d: CMat8) -> Result<Self> {
        let (q, t) = schur_8(&m).ok_or(Error::SingularResponse {
            context: "Schur factorization of the drift matrix",
        })?;
        Ok(MomentFlow {
            m,
            m_dag: m.adjoint(),
            d,
            q_dag: q.adjoint(),
            q,
            t,
        })
    }

    fn rhs(&self, s: &CMat8) -> CMat8 {
        self.m * s + s * self.m_dag + self.d
    }

    /// Applies (I − hγ L)⁻¹ to B via the triangular Sylvester equation
    /// X̃ − hγ(T X̃ + X̃ T†) = B̃ in the Schur basis. T† is lower triangular,
    /// so column j of X̃ T† pulls in columns k ≥ j of X̃: the recursion runs
    /// over columns last-to-first, each one an upper-triangular solve.
    /// `None` when a diagonal pivot degenerates (1/hγ hits the spectrum of L).
    fn solve_w(&self, h_gamma: f64, b: &CMat8) -> Option<CMat8> {
        let hg = Complex64::new(h_gamma, 0.0);
        let bt = self.q_dag * b * self.q;
        let mut xt = CMat8::zeros();
        for j in (0..8).rev() {
            // rhs_j = b̃_j + hγ Σ_{k>j} conj(T[j,k]) x̃_k
            let mut rhs = [Complex64::default(); 8];
            for i in 0..8 {
                rhs[i] = bt[(i, j)];
            }
            for k in j + 1..8 {
                let w = hg * self.t[(j, k)].conj();
                for i in 0..8 {
                    rhs[i] += w * xt[(i, k)];
                }
            }
            // ((1 − hγ conj(T_jj)) I − hγ T) x_j = rhs_j, upper triangular.
            let shift = Complex64::new(1.0, 0.0) - hg * self.t[(j, j)].conj();
            for i in (0..8).rev() {
                let mut acc = rhs[i];
                for k in i + 1..8 {
                    acc += hg * self.t[(i, k)] * xt[(k, j)];
                }
                let pivot = shift - hg * self.t[(i, i)];
                if pivot.norm_sqr()
                    < 1e-26 * (1.0 + (hg * self.t[(i, i)]).norm_sqr() + shift.norm_sqr())
                {
                    return None;
                }
                xt[(i, j)] = acc / pivot;
            }
        }
        Some(self.q * xt * self.q_dag)
    }

    /// One second-order Rosenbrock advance from (s0, f0) over h:
    /// k1 = W⁻¹f0, k2 = W⁻¹(f(s0 + h/2 k1) − k1) + k1, s1 = s0 + h k2.
    /// `None` when a W-solve degenerates.
    fn advance(&self, s0: &CMat8, f0: &CMat8, h: f64) -> Option<CMat8> {
        let hg = h * GAMMA;
        let k1 = self.solve_w(hg, f0)?;
        let f_mid = self.rhs(&(s0 + k1 * Complex64::new(0.5 * h, 0.0)));
        let k2 = self.solve_w(hg, &(f_mid - k1))? + k1;
        Some(s0 + k2 * Complex64::new(h, 0.0))
    }

    /// One error-controlled attempt from (s0, f0) with step h: the full step
    /// is compared against two half steps, and the half-step composition (the
    /// more accurate of the two) is what advances. On acceptance also returns
    /// the advanced state's right-hand side for reuse.
    fn attempt(
        &self,
        s0: &CMat8,
        f0: &CMat8,
        h: f64,
        ctrl: &StepControl,
        s1_out: &mut CMat8,
        f1_out: &mut CMat8,
    ) -> Attempt {
        let broken = Attempt::Broken { non_finite: false };
        let Some(s_full) = self.advance(s0, f0, h) else {
            return broken;
        };
        let Some(s_half) = self.advance(s0, f0, 0.5 * h) else {
            return broken;
        };
        let f_half = self.rhs(&s_half);
        let Some(s1) = self.advance(&s_half, &f_half, 0.5 * h) else {
            return broken;
        };
        if !s1.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Attempt::Broken { non_finite: true };
        }

        let err = s_full - s1;
        let mut err_norm: f64 = 0.0;
        for idx in 0..64 {
            let scale = ctrl.atol + ctrl.rtol * s0[idx].norm().max(s1[idx].norm());
            err_norm = err_norm.max(err[idx].norm() / scale);
        }
        if !err_norm.is_finite() {
            return Attempt::Broken { non_finite: true };
        }
        if err_norm > 1.0 {
            return Attempt::TooLarge { err_norm };
        }
        *s1_out = s1;
        *f1_out = self.rhs(&s1);
        Attempt::Accepted {
            err_norm,
            err_bb: err[(5, 5)].norm(),
        }
    }
}

/// Integrates S from `t0` to the last entry of `sample_times`, emitting the
/// state at each sample time. `sample_times` must be ascending, start at
/// `t0`, and contain at least one entry.
pub(crate) fn integrate(
    flow: &MomentFlow,
    s0: CMat8,
    t0: f64,
    sample_times: &[f64],
    ctrl: &StepControl,
) -> Result<(Vec<(f64, CMat8)>, RunStats)> {
    let t_final = *sample_times.last().expect("at least one sample time");
    let mut out: Vec<(f64, CMat8)> = Vec::with_capacity(sample_times.len());
    let mut stats = RunStats::default();

    let mut s = hermitize(&s0, &mut stats);
    let mut t = t0;
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t {
        out.push((sample_times[next_sample], s));
        next_sample += 1;
    }
    if next_sample >= sample_times.len() {
        return Ok((out, stats));
    }

    // Initial step: resolve the fastest rate, but never overshoot the span.
    let op_norm: f64 = (0..8)
        .map(|i| (0..8).map(|j| flow.m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut h = ctrl
        .initial_dt
        .unwrap_or_else(|| (0.1 / (1.0 + op_norm)).min((t_final - t0) * 1e-3))
        .min(t_final - t);

    let mut f = hermitian_part(&flow.rhs(&s));
    let mut attempts = 0usize;
    let mut s1 = CMat8::zeros();
    let mut f1 = CMat8::zeros();
    while next_sample < sample_times.len() {
        if attempts >= ctrl.max_steps {
            return Err(Error::IntegrationFailure {
                t_reached: t,
                reason: IntegrationFailureReason::StepBudgetExhausted,
            });
        }
        attempts += 1;

        // Clamp onto the next sample time when the step would cross it.
        let t_next = sample_times[next_sample];
        let clamped = t + h >= t_next;
        let h_step = if clamped { t_next - t } else { h };

        if h_step <= f64::EPSILON * 16.0 * (1.0 + t.abs()) && !clamped {
            return Err(Error::IntegrationFailure {
                t_reached: t,
                reason: IntegrationFailureReason::StepSizeUnderflow,
            });
        }

        match flow.attempt(&s, &f, h_step, ctrl, &mut s1, &mut f1) {
            Attempt::Accepted { err_norm, err_bb } => {
                stats.steps += 1;
                stats.error_estimate_bb += err_bb;
                s = hermitize(&s1, &mut stats);
                // The flow preserves Hermiticity, so the Hermitian part of f1
                // IS rhs(s) up to one step's rounding; taking it (rather than
                // f1 itself) stops anti-Hermitian noise from feeding back
                // through the reused right-hand side.
                f = hermitian_part(&f1);
                t = if clamped { t_next } else { t + h_step };
                while next_sample < sample_times.len() && sample_times[next_sample] <= t {
                    out.push((sample_times[next_sample], s));
                    next_sample += 1;
                }
                let grow = 0.9 * libm::cbrt(1.0 / err_norm.max(1e-12));
                let proposal = h_step * grow.clamp(0.2, 5.0);
                // A clamped step is short by fiat, not by error control: keep
                // the learned step size if it is larger.
                h = if clamped { proposal.max(h) } else { proposal };
            }
            Attempt::TooLarge { err_norm } => {
                let shrink = 0.9 * libm::cbrt(1.0 / err_norm);
                h = h_step * shrink.clamp(0.1, 0.9);
                check_underflow(h, t, IntegrationFailureReason::StepSizeUnderflow)?;
            }
            Attempt::Broken { non_finite } => {
                h = 0.25 * h_step;
                let reason = if non_finite {
                    IntegrationFailureReason::NonFiniteState
                } else {
                    IntegrationFailureReason::StepSizeUnderflow
                };
                check_underflow(h, t, reason)?;
            }
        }
    }
    Ok((out, stats))
}

fn check_underflow(h: f64, t: f64, reason: IntegrationFailureReason) -> Result<()> {
    if h <= f64::EPSILON * 4.0 * (1.0 + t.abs()) {
        Err(Error::IntegrationFailure { t_reached: t, reason })
    } else {
        Ok(())
    }
}

fn hermitian_part(m: &CMat8) -> CMat8 {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn hermitize(s: &CMat8, stats: &mut RunStats) -> CMat8 {
    let asym = s - s.adjoint();
    let drift = asym.iter().map(|z| z.norm()).fold(0.0, f64::max);
    stats.max_hermiticity_drift = stats.max_hermiticity_drift.max(drift);
    hermitian_part(s)
}
