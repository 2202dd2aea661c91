//! Closed-form concurrence for the braided layout.
//!
//! The concurrence starting from `|eg⟩` is written through a handful of
//! trigonometric polynomials of θ and four time-dependent functions `R1..R4`.
//! Square roots use the principal branch. `A` has no zero on the real θ axis
//! (the minimum of `|A|²` is about 3.46), but the formula still falls back to
//! the effective-Hamiltonian propagator when `A A*` is tiny or the exponentials
//! overflow, and reports that it did so.

use crate::coefficients::closed_form_braided;
use crate::dynamics::{concurrence_from_amplitudes, evolve_amplitudes, AmplitudeState};
use crate::error::{Error, Result};
use crate::C64;

/// `|A|²` below this triggers the fallback.
pub const A_ZERO_THRESHOLD: f64 = 1e-8;

/// Coefficients of the degree-10 polynomial under the square root of `A`
/// (after the `e^{3iθ}` prefactor), lowest power first.
const A_POLY: [f64; 11] = [37.0, -50.0, 93.0, -80.0, 86.0, -52.0, 38.0, -16.0, 9.0, -2.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixBTerms {
    pub a_term: C64,
    pub b_term: C64,
    pub d_term: C64,
    pub e_term: C64,
    pub f_term: C64,
    pub b1: C64,
    pub b2: C64,
}

fn e_i(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

/// `A²`, evaluated directly as `e^{3iθ} Σ a_k e^{ikθ}`.
pub fn a_squared(theta: f64) -> C64 {
    let poly: C64 = A_POLY
        .iter()
        .enumerate()
        .map(|(k, &a)| e_i(k as f64 * theta) * a)
        .sum();
    e_i(3.0 * theta) * poly
}

pub fn appendix_b_terms(theta: f64) -> AppendixBTerms {
    let (s, co) = (f64::sin, f64::cos);
    let i = C64::new(0.0, 1.0);

    let a_term = a_squared(theta).sqrt();
    let d_term = [(0, 4.0), (1, 1.0), (2, 4.0), (3, 3.0), (5, 3.0), (7, 1.0)]
        .iter()
        .map(|&(k, w)| e_i(k as f64 * theta) * w)
        .sum();
    let e_term = -3.0 + co(theta) * (3.0 - 4.0 * i * s(theta)) + i * s(theta) - 4.0 * co(2.0 * theta);
    let f_term = 16.0 * i * e_i(4.0 * theta) * co(theta).powi(2) * s(theta / 2.0);
    let b1 = C64::new(
        -26.0 + 62.0 * co(theta) - 48.0 * co(2.0 * theta) + 51.0 * co(3.0 * theta) - 26.0 * co(4.0 * theta)
            + 19.0 * co(5.0 * theta),
        0.0,
    );
    let b2 = C64::new(
        0.0,
        -24.0 * s(theta) + 32.0 * s(2.0 * theta) - 42.0 * s(3.0 * theta) + 24.0 * s(4.0 * theta)
            - 18.0 * s(5.0 * theta),
    );
    let b_term = ((b1 + b2) * e_i(8.0 * theta)).sqrt();

    AppendixBTerms {
        a_term,
        b_term,
        d_term,
        e_term,
        f_term,
        b1,
        b2,
    }
}

/// Concurrence value and whether the propagator fallback produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormConcurrence {
    pub value: f64,
    pub fallback: bool,
}

/// The four time-dependent functions at `γt`.
pub fn r_functions(terms: &AppendixBTerms, theta: f64, gamma_t: f64) -> [C64; 4] {
    let half = (theta / 2.0).cos();
    let rate = std::f64::consts::SQRT_2 * gamma_t * half;
    let grow = (terms.b_term * rate).exp();
    let grow_conj = (terms.b_term.conj() * rate).exp();
    [
        (terms.d_term + 2.0 * terms.a_term * half) * gamma_t,
        terms.e_term * (grow_conj - 1.0),
        2.0 * terms.a_term * (grow + 1.0),
        terms.f_term * (grow - 1.0),
    ]
}

/// Braided-layout concurrence at time `t` from `|eg⟩`:
/// `C = e^{−Re R1 / 2} / 2 · |R2 (R3 + R4) / (A A*)|`.
pub fn closed_form_concurrence_braided(theta: f64, gamma: f64, t: f64) -> Result<ClosedFormConcurrence> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("theta must be finite, got {theta}")));
    }
    let terms = appendix_b_terms(theta);
    let a_norm = terms.a_term.norm_sqr();
    if a_norm >= A_ZERO_THRESHOLD {
        let [r1, r2, r3, r4] = r_functions(&terms, theta, gamma * t);
        let value = (-0.5 * r1.re).exp() / 2.0 * (r2 * (r3 + r4) / a_norm).norm();
        if value.is_finite() {
            return Ok(ClosedFormConcurrence { value, fallback: false });
        }
    }
    let state = evolve_amplitudes(&AmplitudeState::excited_a(), &closed_form_braided(gamma, theta), t)?;
    Ok(ClosedFormConcurrence {
        value: concurrence_from_amplitudes(&state),
        fallback: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn terms_at_zero() {
        let t = appendix_b_terms(0.0);
        assert!((t.a_term - C64::new(8.0, 0.0)).norm() < 1e-12);
        assert!((t.d_term - C64::new(16.0, 0.0)).norm() < 1e-12);
        assert!((t.e_term - C64::new(-4.0, 0.0)).norm() < 1e-12);
        assert!(t.f_term.norm() < 1e-12);
        assert!((t.b_term - C64::new(32f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!((t.b1 - C64::new(32.0, 0.0)).norm() < 1e-12);
        assert!(t.b2.norm() < 1e-12);
    }

    #[test]
    fn f_vanishes_at_multiples_of_two_pi() {
        for n in 0..5 {
            assert!(appendix_b_terms(2.0 * PI * n as f64).f_term.norm() < 1e-10);
        }
    }

    #[test]
    fn definitions_are_consistent() {
        for k in 0..200 {
            let theta = -3.0 + 0.05 * k as f64;
            let t = appendix_b_terms(theta);
            let b_sq = (t.b1 + t.b2) * e_i(8.0 * theta);
            assert!((t.b_term * t.b_term - b_sq).norm() < 1e-10);
            let poly: C64 = A_POLY.iter().enumerate().map(|(k, &a)| e_i(k as f64 * theta) * a).sum();
            assert!((t.a_term * t.a_term - e_i(3.0 * theta) * poly).norm() < 1e-10);
        }
    }

    #[test]
    fn a_has_no_real_zero() {
        let min = (0..=200_000)
            .map(|k| a_squared(2.0 * PI * k as f64 / 200_000.0).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(min > 3.4 && min < 3.5, "{min}");
    }

    #[test]
    fn steady_state_reduction() {
        let c = closed_form_concurrence_braided(0.0, 1.0, 0.1).unwrap();
        assert!(!c.fallback);
        // (1 − e^{−1.6}) / 2 = 0.399052...
        assert!((c.value - (1.0 - (-1.6f64).exp()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn peak_at_dfi() {
        let c = closed_form_concurrence_braided(PI / 2.0, 1.0, PI / 4.0).unwrap();
        assert!((c.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn starts_unentangled() {
        for theta in [0.0, 0.3, 1.7, PI, 5.0] {
            assert!(closed_form_concurrence_braided(theta, 1.0, 0.0).unwrap().value.abs() < 1e-14);
        }
    }

    #[test]
    fn overflow_falls_back() {
        let c = closed_form_concurrence_braided(0.0, 1.0, 200.0).unwrap();
        assert!(c.fallback);
        assert!((c.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(closed_form_concurrence_braided(0.1, 0.0, 1.0).is_err());
        assert!(closed_form_concurrence_braided(0.1, 1.0, -1.0).is_err());
        assert!(closed_form_concurrence_braided(f64::NAN, 1.0, 1.0).is_err());
    }
}
