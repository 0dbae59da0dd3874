//! Real roots of real-coefficient cubics.
//!
//! Closed-form (trigonometric / Cardano) evaluation followed by Newton
//! polishing on the original polynomial. The steady-state photon numbers this
//! feeds span many orders of magnitude, so everything is done on the monic
//! depressed form and polished back on the caller's coefficients. When root
//! separation pushes the discriminant below its noise floor the closed form
//! is abandoned and roots are isolated by bisection on the cubic's monotone
//! intervals instead.

use alloc::vec::Vec;
use libm::{acos, cbrt, cos, fabs, sqrt};

/// Largest |f'(x)| considered zero during polishing, relative to coefficients.
const DERIV_FLOOR: f64 = 1e-300;

/// Discriminants smaller than this (relative to the competing terms) are
/// floating-point noise; the closed form cannot decide the branch structure
/// and root isolation takes over.
const DISC_SAFE: f64 = 1e-8;

/// All real roots of `c3 x³ + c2 x² + c1 x + c0 = 0`, ascending.
///
/// Degenerate leading coefficients fall through to the quadratic/linear
/// cases. Multiple roots are returned with their multiplicity (up to the
/// solver's ability to resolve them); deduplication is the caller's concern.
/// The identically-zero polynomial returns no roots.
///
/// Uses the trigonometric/Cardano closed form when the discriminant's sign is
/// numerically decisive, and falls back to sign-change isolation on the
/// cubic's monotone intervals otherwise (roots separated by many orders of
/// magnitude push the discriminant below the noise floor even when all roots
/// are real and well-separated). Every root is Newton-polished on the
/// original coefficients.
pub fn real_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c3 == 0.0 {
        return quadratic_roots(c2, c1, c0);
    }
    // Monic: x³ + b x² + c x + d.
    let b = c2 / c3;
    let c = c1 / c3;
    let d = c0 / c3;
    // Depressed: t = x + b/3, t³ + p t + q.
    let shift = b / 3.0;
    let p = c - b * shift;
    let q = (2.0 * shift * shift - c) * shift + d;

    let mut roots: Vec<f64> = Vec::with_capacity(3);
    let p_cube = 4.0 * p * p * p;
    let q_sq = 27.0 * q * q;
    let disc = -p_cube - q_sq;
    let disc_scale = fabs(p_cube) + q_sq;
    if disc_scale == 0.0 {
        // p = q = 0: triple root.
        roots.extend_from_slice(&[-shift, -shift, -shift]);
    } else if disc > DISC_SAFE * disc_scale {
        // Three well-separated real roots: trigonometric form.
        let m = 2.0 * sqrt(-p / 3.0);
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = acos(arg) / 3.0;
        for k in 0..3 {
            let t = m * cos(theta - 2.0 * core::f64::consts::PI * k as f64 / 3.0);
            roots.push(t - shift);
        }
    } else if disc < -DISC_SAFE * disc_scale {
        // One real root (Cardano, cancellation-safe branch).
        let r = sqrt(q * q / 4.0 + p * p * p / 27.0);
        let u = if q <= 0.0 { cbrt(-q / 2.0 + r) } else { cbrt(-q / 2.0 - r) };
        let t = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        roots.push(t - shift);
    } else {
        roots = isolate_roots(c3, c2, c1, c0);
    }

    for x in roots.iter_mut() {
        *x = polish(*x, c3, c2, c1, c0);
    }
    roots.sort_unstable_by(f64::total_cmp);
    roots
}

/// Root isolation on the cubic's monotone intervals, for the regime where
/// the discriminant sign is unreliable.
///
/// The critical points of the cubic split the line into at most three
/// monotone pieces; each holds at most one root, found by bisection. A
/// critical point where the cubic (numerically) vanishes is a double root.
fn isolate_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let eval = |x: f64| ((c3 * x + c2) * x + c1) * x + c0;
    // Magnitude of the evaluation noise floor at x.
    let noise = |x: f64| {
        let ax = fabs(x);
        64.0 * f64::EPSILON
            * (fabs(c3) * ax * ax * ax + fabs(c2) * ax * ax + fabs(c1) * ax + fabs(c0))
    };
    // Cauchy bound: no roots beyond this magnitude, so the outer endpoint
    // signs follow the leading term analytically.
    let bound =
        1.0 + (fabs(c2).max(fabs(c1)).max(fabs(c0)) / fabs(c3)).min(1e100);
    let lead = if c3 > 0.0 { 1.0 } else { -1.0 };

    let mut breaks: Vec<f64> = Vec::with_capacity(4);
    breaks.push(-bound);
    for x in quadratic_roots(3.0 * c3, 2.0 * c2, c1) {
        if x > -bound && x < bound {
            breaks.push(x);
        }
    }
    breaks.push(bound);

    let mut roots = Vec::with_capacity(3);
    // Signs at the breakpoints; outer ones are analytic, zeros at critical
    // points are roots themselves.
    let mut signs: Vec<f64> = Vec::with_capacity(breaks.len());
    for (i, &x) in breaks.iter().enumerate() {
        if i == 0 {
            signs.push(-lead);
        } else if i == breaks.len() - 1 {
            signs.push(lead);
        } else {
            let f = eval(x);
            if fabs(f) <= noise(x) {
                // Double root at a critical point.
                roots.push(x);
                roots.push(x);
                signs.push(0.0);
            } else {
                signs.push(if f > 0.0 { 1.0 } else { -1.0 });
            }
        }
    }
    for i in 0..breaks.len() - 1 {
        if signs[i] * signs[i + 1] < 0.0 {
            roots.push(bisect(&eval, breaks[i], breaks[i + 1], signs[i]));
        }
    }
    roots
}

/// Bisection on [lo, hi] with sign(f(lo)) = sign_lo != sign(f(hi)).
fn bisect(eval: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, sign_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = eval(mid);
        if f == 0.0 {
            return mid;
        }
        if (f > 0.0) == (sign_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots of `a x² + b x + c = 0`, ascending; falls through to linear.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let mut roots = Vec::with_capacity(2);
    if a == 0.0 {
        if b != 0.0 {
            roots.push(-c / b);
        }
        return roots;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return roots;
    }
    // q-form avoids cancellation between -b and the radical.
    let sd = sqrt(disc);
    let q = -0.5 * (b + if b >= 0.0 { sd } else { -sd });
    if q == 0.0 {
        roots.push(0.0);
        roots.push(0.0);
    } else {
        roots.push(q / a);
        roots.push(c / q);
    }
    roots.sort_unstable_by(f64::total_cmp);
    roots
}

/// Guarded Newton iteration on the caller's polynomial, run to convergence.
///
/// The closed-form seed can carry absolute error proportional to the
/// coefficient scale, which is enormous relative to a root many orders of
/// magnitude smaller; quadratic convergence recovers full precision in a few
/// steps.
fn polish(x0: f64, c3: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    let eval = |x: f64| ((c3 * x + c2) * x + c1) * x + c0;
    let deriv = |x: f64| (3.0 * c3 * x + 2.0 * c2) * x + c1;
    let mut x = x0;
    let mut f = eval(x);
    for _ in 0..8 {
        let df = deriv(x);
        if fabs(df) < DERIV_FLOOR {
            break;
        }
        let x_next = x - f / df;
        let f_next = eval(x_next);
        if !x_next.is_finite() || fabs(f_next) > fabs(f) {
            break;
        }
        let step = fabs(x_next - x);
        x = x_next;
        f = f_next;
        if step <= 1e-15 * fabs(x) {
            break;
        }
    }
    x
}
