//! Dense complex linear algebra for the 8-mode moment system: the drift
//! spectrum via complex Schur, and the Lyapunov steady state via an LU solve
//! of the 64×64 Kronecker system. The Lyapunov route deliberately shares no
//! numerics with the ODE integrator's Schur-based solver, so the two act as
//! independent cross-checks.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SMatrix};
use num_complex::Complex64;

use crate::{Error, Result};

pub(crate) type CMat8 = SMatrix<Complex64, 8, 8>;

/// Complex Schur factorization M = Q T Q† with T upper triangular.
///
/// `None` only if the QR iteration stalls, which does not happen for finite
/// input; non-finite input is rejected before iterating.
pub(crate) fn schur_8(m: &CMat8) -> Option<(CMat8, CMat8)> {
    if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return None;
    }
    let (q, t) = nalgebra::linalg::Schur::try_new(*m, f64::EPSILON, 0)?.unpack();
    Some((q, t))
}

/// Eigenvalues of M, sorted by real part descending (imaginary part
/// descending as tiebreak). Non-finite input yields NaN eigenvalues.
pub(crate) fn spectrum_8(m: &CMat8) -> Vec<Complex64> {
    let mut eigs: Vec<Complex64> = match schur_8(m) {
        Some((_, t)) => t.diagonal().iter().copied().collect(),
        None => [Complex64::new(f64::NAN, f64::NAN); 8].into(),
    };
    eigs.sort_unstable_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    eigs
}

/// Solves the continuous Lyapunov equation M S + S M† + D = 0 by LU on the
/// column-major Kronecker form (I ⊗ M + conj(M) ⊗ I) vec(S) = −vec(D).
///
/// The result is re-Hermitized. The caller is responsible for M being
/// Hurwitz; a singular operator (e.g. eigenvalues λ_i + conj(λ_j) = 0)
/// surfaces as an error.
pub(crate) fn lyapunov_steady_state(m: &CMat8, d: &CMat8) -> Result<CMat8> {
    let mut big = DMatrix::<Complex64>::zeros(64, 64);
    for j in 0..8 {
        for i in 0..8 {
            for k in 0..8 {
                // vec index r = i + 8j addresses S[(i, j)].
                big[(i + 8 * j, k + 8 * j)] += m[(i, k)];
                big[(i + 8 * j, i + 8 * k)] += m[(j, k)].conj();
            }
        }
    }
    let rhs = DVector::from_iterator(64, d.iter().map(|z| -z));
    let sol = nalgebra::linalg::LU::new(big)
        .solve(&rhs)
        .ok_or(Error::SingularResponse {
            context: "Lyapunov operator I⊗M + conj(M)⊗I",
        })?;
    let s = CMat8::from_iterator(sol.iter().copied());
    Ok((s + s.adjoint()) * Complex64::new(0.5, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag8(entries: [Complex64; 8]) -> CMat8 {
        CMat8::from_diagonal(&SMatrix::<Complex64, 8, 1>::from(entries))
    }

    #[test]
    fn spectrum_of_diagonal_matrix_is_its_diagonal() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let m = diag8([
            c(-1.0, 2.0),
            c(-0.5, -1.0),
            c(-3.0, 0.0),
            c(-0.1, 5.0),
            c(-1.0, -2.0),
            c(-0.5, 1.0),
            c(-3.0, 0.0),
            c(-0.1, -5.0),
        ]);
        let eigs = spectrum_8(&m);
        assert_relative_eq!(eigs[0].re, -0.1, max_relative = 1e-12);
        assert_relative_eq!(eigs[0].im, 5.0, max_relative = 1e-12);
        // Sorted by real part descending.
        for w in eigs.windows(2) {
            assert!(w[0].re >= w[1].re);
        }
        let mut res: Vec<f64> = eigs.iter().map(|z| z.re).collect();
        res.sort_unstable_by(f64::total_cmp);
        assert_relative_eq!(res[0], -3.0, max_relative = 1e-12);
    }

    #[test]
    fn lyapunov_solves_scalar_decay() {
        // Single decaying mode with injection: 2 Re(λ) s + d = 0.
        let mut m = CMat8::zeros();
        for i in 0..8 {
            m[(i, i)] = Complex64::new(-1.0 - i as f64, 0.3 * i as f64);
        }
        let mut d = CMat8::zeros();
        for i in 0..8 {
            d[(i, i)] = Complex64::new(2.0 + i as f64, 0.0);
        }
        let s = lyapunov_steady_state(&m, &d).unwrap();
        for i in 0..8 {
            let expect = d[(i, i)].re / (2.0 * (1.0 + i as f64));
            assert_relative_eq!(s[(i, i)].re, expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn lyapunov_residual_vanishes_on_coupled_system() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let mut m = CMat8::zeros();
        for i in 0..8 {
            for j in 0..8 {
                m[(i, j)] = c(0.1 * ((i * 3 + j) % 5) as f64, 0.2 * ((i + 2 * j) % 7) as f64);
            }
            m[(i, i)] -= c(4.0, 0.0);
        }
        let mut d = CMat8::zeros();
        for i in 0..8 {
            d[(i, i)] = c(1.0 + 0.5 * i as f64, 0.0);
        }
        let s = lyapunov_steady_state(&m, &d).unwrap();
        let residual = m * s + s * m.adjoint() + d;
        let scale: f64 = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for z in residual.iter() {
            assert!(z.norm() <= 1e-11 * scale, "residual {z}");
        }
        // Hermitian output.
        let asym = s - s.adjoint();
        assert!(asym.iter().all(|z| z.norm() < 1e-14 * scale));
    }

    #[test]
    fn singular_operator_is_reported() {
        // λ = 0 makes λ_i + conj(λ_j) singular.
        let m = CMat8::zeros();
        let mut d = CMat8::zeros();
        d[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            lyapunov_steady_state(&m, &d),
            Err(Error::SingularResponse { .. })
        ));
    }
}
