//! Keller–Osserman integrals.
//!
//! Two different objects live here and are never merged:
//!
//! - [`ko_integral`]: `∫₁^∞ dt / √(∫₀ᵗ φ)`, the envelope condition and the
//!   diagonal integrals `F(∞)`, `G(∞)`;
//! - [`transform_h`]: the tail transform `H(s) = ∫_s^∞ dt / (f(t,t) + g(t,t))`
//!   and its inverse, which give the lower bound on `u + v`.
//!
//! [`primitive_cf`] is the primitive `C_f(s) = ∫_{s*}^s dτ/ℓ(τ)` used by the
//! barrier construction.

use alloc::format;

use crate::error::{Error, Result};
use crate::math;
use crate::numerics::quad::{decade_series, integrate, tail_integral, DecadeRule, IntegralVerdict, Quadrature};
use crate::problem::{Envelope, NonlinearPair};

/// Lower end of the bracketing domain for [`inverse_h`].
pub const S_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KoOptions {
    pub rule: DecadeRule,
    /// Relative tolerance of every adaptive quadrature call.
    pub rel_tol: f64,
}

impl Default for KoOptions {
    fn default() -> Self {
        KoOptions {
            rule: DecadeRule::default(),
            rel_tol: 1e-13,
        }
    }
}

/// Envelope integral and the two diagonal integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KoReport {
    /// `None` when the pair has neither an explicit nor a default envelope.
    pub h_env: Option<IntegralVerdict>,
    pub f_inf: IntegralVerdict,
    pub g_inf: IntegralVerdict,
}

impl KoReport {
    /// Both `F(∞)` and `G(∞)` finite.
    pub fn both_diagonals_finite(&self) -> bool {
        self.f_inf.is_finite() && self.g_inf.is_finite()
    }
}

fn ensure_positive<F: Fn(f64) -> f64>(phi: &F, from: f64, what: &str) -> Result<()> {
    // Log-spaced probes over a wide range; a nondecreasing φ vanishing at any
    // of them vanishes on an interval.
    let mut s = from.max(1e-12);
    for _ in 0..40 {
        let v = phi(s);
        if !(v > 0.0) {
            return Err(Error::Precondition(format!(
                "{what} is not positive at {s} (value {v})"
            )));
        }
        s *= 3.0;
        if s > 1e18 {
            break;
        }
    }
    Ok(())
}

/// `∫₁^∞ dt / √(∫₀ᵗ φ(z) dz)` with the decade verdict rule, probing up to
/// `upper_probe`.
pub fn ko_integral<F: Fn(f64) -> f64>(phi: F, upper_probe: f64) -> Result<IntegralVerdict> {
    let opts = KoOptions {
        rule: DecadeRule {
            upper_probe,
            ..DecadeRule::default()
        },
        ..KoOptions::default()
    };
    ko_integral_with(phi, &opts)
}

pub fn ko_integral_with<F: Fn(f64) -> f64>(phi: F, opts: &KoOptions) -> Result<IntegralVerdict> {
    ensure_positive(&phi, 1e-6, "the Keller–Osserman integrand")?;
    let tol = opts.rel_tol;
    let head = integrate(&phi, 0.0, 1.0, 0.0, tol, 500);
    // Φ at the left end of the current decade, advanced decade by decade.
    let mut phi_lo = head.value;
    let mut lo_prev = 1.0;
    let verdict = decade_series(1.0, &opts.rule, |lo, hi| {
        if lo > lo_prev {
            phi_lo += integrate(&phi, lo_prev, lo, 0.0, tol, 500).value;
            lo_prev = lo;
        }
        let base = phi_lo;
        let integrand = |y: f64| {
            let t = math::exp(y);
            let big_phi = base + integrate(&phi, lo, t, 0.0, tol, 200).value;
            if big_phi.is_finite() && big_phi > 0.0 {
                t / math::sqrt(big_phi)
            } else {
                0.0
            }
        };
        let q = integrate(integrand, math::ln(lo), math::ln(hi), 0.0, tol, 200);
        Quadrature {
            value: q.value,
            error: q.error,
        }
    });
    Ok(verdict)
}

/// `F(∞)`, `G(∞)` and, when available, the envelope integral.
pub fn ko_report(nl: &NonlinearPair) -> Result<KoReport> {
    ko_report_with(nl, nl.envelope().as_ref(), &KoOptions::default())
}

pub fn ko_report_with(nl: &NonlinearPair, env: Option<&Envelope>, opts: &KoOptions) -> Result<KoReport> {
    let h_env = match env {
        Some(e) => Some(ko_integral_with(|z| e.h.eval(z), opts)?),
        None => None,
    };
    Ok(KoReport {
        h_env,
        f_inf: ko_integral_with(|z| nl.f(z, z), opts)?,
        g_inf: ko_integral_with(|z| nl.g(z, z), opts)?,
    })
}

/// `H(s) = ∫_s^∞ dt / S(t)` with `S(t) = f(t,t) + g(t,t)`.
pub fn transform_h(nl: &NonlinearPair, s: f64) -> Result<IntegralVerdict> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidInput(format!("H needs s > 0, got {s}")));
    }
    let big_s = |t: f64| nl.diagonal_sum(t);
    // S is nondecreasing, so positivity at s covers [s, ∞).
    let at_s = big_s(s);
    if !(at_s > 0.0) {
        return Err(Error::Precondition(format!(
            "f(t,t) + g(t,t) vanishes at t = {s}; H is undefined there"
        )));
    }
    Ok(tail_integral(|t| 1.0 / big_s(t), s, &DecadeRule::default()))
}

/// `s` with `H(s) = y`, by log-space bisection on `[S_MIN, ∞)`.
/// `|H(s) − y| ≤ tol·y` on return, unless the bracket collapses first (then
/// `s` is accurate to a few ulps).
pub fn inverse_h(nl: &NonlinearPair, y: f64, tol: f64) -> Result<f64> {
    let h_of = |s: f64| -> Result<f64> {
        match transform_h(nl, s)? {
            IntegralVerdict::Finite { value, .. } => Ok(value),
            IntegralVerdict::Infinite { .. } => Err(Error::Inapplicable(
                "the tail integral of 1/(f(t,t) + g(t,t)) diverges".into(),
            )),
        }
    };
    let h_max = h_of(S_MIN)?;
    if !(y > 0.0 && y < h_max) {
        return Err(Error::OutOfRange {
            value: y,
            low: 0.0,
            high: h_max,
        });
    }
    let mut lo = S_MIN;
    let mut hi = 1.0f64;
    while h_of(hi)? > y {
        lo = hi;
        hi *= 10.0;
        if hi > 1e300 {
            return Err(Error::OutOfRange {
                value: y,
                low: 0.0,
                high: h_max,
            });
        }
    }
    let (mut l, mut h) = (math::ln(lo), math::ln(hi));
    for _ in 0..200 {
        let mid = 0.5 * (l + h);
        let s = math::exp(mid);
        let hv = h_of(s)?;
        if (hv - y).abs() <= tol * y {
            return Ok(s);
        }
        if hv > y {
            l = mid;
        } else {
            h = mid;
        }
        if h - l <= 4.0 * f64::EPSILON * l.abs().max(1.0) {
            break;
        }
    }
    Ok(math::exp(0.5 * (l + h)))
}

fn check_ell<F: Fn(f64) -> f64>(ell: &F, s_star: f64, s: f64) -> Result<()> {
    const PROBES: usize = 16;
    for i in 0..=PROBES {
        let x = if s.is_finite() {
            s_star + (s - s_star) * (i as f64 / PROBES as f64)
        } else {
            s_star * math::pow(10.0, i as f64)
        };
        let v = ell(x);
        if !(v > 0.0) {
            return Err(Error::Precondition(format!("ℓ is not positive at τ = {x} (value {v})")));
        }
    }
    Ok(())
}

/// `C_f(s) = ∫_{s*}^s dτ / ℓ(τ)` for `s ≥ s*`.
pub fn primitive_cf<F: Fn(f64) -> f64>(ell: F, s_star: f64, s: f64) -> Result<f64> {
    if !(s >= s_star) {
        return Err(Error::InvalidInput(format!("C_f needs s ≥ s* = {s_star}, got {s}")));
    }
    if s == s_star {
        return Ok(0.0);
    }
    check_ell(&ell, s_star, s)?;
    let q = if s_star > 0.0 && s / s_star > 4.0 {
        integrate(
            |y| {
                let t = math::exp(y);
                t / ell(t)
            },
            math::ln(s_star),
            math::ln(s),
            0.0,
            1e-13,
            500,
        )
    } else {
        integrate(|t| 1.0 / ell(t), s_star, s, 0.0, 1e-13, 500)
    };
    Ok(q.value)
}

/// `C_f(∞)`, finite iff `∫^∞ dτ/ℓ` converges.
pub fn primitive_cf_infinity<F: Fn(f64) -> f64>(ell: F, s_star: f64) -> Result<IntegralVerdict> {
    if !(s_star > 0.0) {
        return Err(Error::InvalidInput(format!("C_f(∞) needs s* > 0, got {s_star}")));
    }
    check_ell(&ell, s_star, f64::INFINITY)?;
    Ok(tail_integral(|t| 1.0 / ell(t), s_star, &DecadeRule::default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Nonlinearity, ScalarMap};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn diag(s_of_t: fn(f64) -> f64) -> NonlinearPair {
        // Split S evenly between f and g along the diagonal.
        NonlinearPair::new(
            Nonlinearity::custom("half S", move |s, t| 0.5 * s_of_t(s.min(t))),
            Nonlinearity::custom("half S", move |s, t| 0.5 * s_of_t(s.min(t))),
        )
    }

    #[test]
    fn power_family_verdicts() {
        for (gamma, finite) in [(0.5, false), (1.0, false), (1.5, true), (2.0, true), (3.0, true)] {
            let v = ko_integral(|z: f64| z.powf(gamma), 1e100).unwrap();
            assert_eq!(v.is_finite(), finite, "gamma = {gamma}: {v:?}");
        }
        let v = ko_integral(|z: f64| z * z * z, 1e100).unwrap();
        assert!((v.value().unwrap() - 2.0).abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn vanishing_integrand_rejected() {
        assert!(ko_integral(|z: f64| if z < 5.0 { 0.0 } else { z }, 1e100).is_err());
    }

    #[test]
    fn verdicts_stable_under_tolerance_change() {
        let loose = KoOptions {
            rel_tol: 1e-10,
            ..KoOptions::default()
        };
        for gamma in [0.5, 2.0, 3.0] {
            let a = ko_integral_with(|z: f64| z.powf(gamma), &KoOptions::default()).unwrap();
            let b = ko_integral_with(|z: f64| z.powf(gamma), &loose).unwrap();
            assert_eq!(a.is_finite(), b.is_finite());
            if let (Some(x), Some(y)) = (a.value(), b.value()) {
                assert!((x - y).abs() <= a.error().unwrap() + b.error().unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn report_for_quartic_diagonal() {
        let nl = NonlinearPair::power(1.0, 2.0, 2.0, 1.0, 2.0, 2.0);
        let r = ko_report(&nl).unwrap();
        assert!(r.both_diagonals_finite());
        assert!(r.h_env.unwrap().is_finite());
        let nl = NonlinearPair::power(1.0, 0.5, 0.5, 1.0, 0.5, 0.5);
        let r = ko_report(&nl).unwrap();
        assert!(!r.f_inf.is_finite() && !r.g_inf.is_finite());
        assert!(!r.h_env.unwrap().is_finite());
    }

    #[test]
    fn transform_closed_forms() {
        let nl = NonlinearPair::power(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        assert_relative_eq!(
            transform_h(&nl, 1.0).unwrap().value().unwrap(),
            0.5,
            max_relative = 1e-12
        );
        let linear = diag(|t| t);
        assert!(!transform_h(&linear, 1.0).unwrap().is_finite());
        assert!(matches!(inverse_h(&linear, 1.0, 1e-10), Err(Error::Inapplicable(_))));
        assert!(transform_h(&nl, 0.0).is_err());
    }

    #[test]
    fn inverse_closed_form_and_range() {
        let nl = NonlinearPair::power(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        assert_relative_eq!(inverse_h(&nl, 0.5, 1e-12).unwrap(), 1.0, max_relative = 1e-10);
        match inverse_h(&nl, 1e7, 1e-12) {
            Err(Error::OutOfRange { high, .. }) => assert_relative_eq!(high, 5e5, max_relative = 1e-8),
            other => panic!("{other:?}"),
        }
        assert!(inverse_h(&nl, 0.0, 1e-12).is_err());
        let small = inverse_h(&nl, 1e-6, 1e-12).unwrap();
        let smaller = inverse_h(&nl, 1e-8, 1e-12).unwrap();
        assert!(smaller > small && small > 1e5);
    }

    #[test]
    fn round_trip() {
        let nl = NonlinearPair::power(1.0, 2.0, 2.0, 1.0, 2.0, 2.0);
        for s in [0.1, 1.0, 10.0] {
            let y = transform_h(&nl, s).unwrap().value().unwrap();
            assert_relative_eq!(inverse_h(&nl, y, 1e-12).unwrap(), s, max_relative = 1e-8);
        }
    }

    #[test]
    fn transform_is_convex_on_samples() {
        let nl = NonlinearPair::power(1.0, 2.0, 1.0, 1.0, 1.0, 2.0);
        let hs: alloc::vec::Vec<f64> = (1..40)
            .map(|i| transform_h(&nl, 0.25 * i as f64).unwrap().value().unwrap())
            .collect();
        for w in hs.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12 * w[1]);
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn primitive_closed_forms() {
        let ell = |t: f64| t * t;
        assert_relative_eq!(primitive_cf(ell, 1.0, 4.0).unwrap(), 0.75, max_relative = 1e-12);
        assert_eq!(primitive_cf(ell, 1.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(
            primitive_cf_infinity(ell, 1.0).unwrap().value().unwrap(),
            1.0,
            max_relative = 1e-10
        );
        assert!(!primitive_cf_infinity(|t: f64| t, 1.0).unwrap().is_finite());
        assert!(primitive_cf(|t: f64| t - 2.0, 1.0, 4.0).is_err());
        assert!(primitive_cf(ell, 2.0, 1.0).is_err());
    }

    #[test]
    fn envelope_choice_matters() {
        let linear = ScalarMap::power(0.5e-3, 1.0);
        let quadratic = ScalarMap::power(0.5e-6, 2.0);
        assert!(!ko_integral(|z| linear.eval(z), 1e100).unwrap().is_finite());
        assert!(ko_integral(|z| quadratic.eval(z), 1e100).unwrap().is_finite());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn primitive_derivative_recovers_reciprocal(s in 1.5f64..50.0, k in 1.2f64..3.0) {
            let ell = move |t: f64| t.powf(k) + t;
            let h = 1e-4 * s;
            let d = (primitive_cf(ell, 1.0, s + h).unwrap() - primitive_cf(ell, 1.0, s - h).unwrap()) / (2.0 * h);
            prop_assert!((d * ell(s) - 1.0).abs() < 1e-4);
        }

        #[test]
        fn transform_strictly_decreasing(s1 in 0.05f64..20.0, factor in 1.01f64..5.0) {
            let nl = NonlinearPair::power(1.0, 1.5, 1.0, 2.0, 1.0, 1.5);
            let a = transform_h(&nl, s1).unwrap().value().unwrap();
            let b = transform_h(&nl, s1 * factor).unwrap().value().unwrap();
            prop_assert!(b < a);
        }
    }
}
