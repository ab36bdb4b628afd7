use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;

/// Decay class of a weight at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// `w(r) = 0` for `r ≥ cutoff`.
    CompactSupport { cutoff: f64 },
    /// `w(r) = O(r^{−κ})`.
    PowerDecay { kappa: f64 },
    /// `w(r) = O(e^{−λr})`.
    ExponentialDecay { rate: f64 },
    /// No decay information; finiteness of the potential is decided numerically.
    NoDecay,
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::CompactSupport { cutoff } => write!(f, "compact(cutoff={cutoff})"),
            Tail::PowerDecay { kappa } => write!(f, "power(kappa={kappa})"),
            Tail::ExponentialDecay { rate } => write!(f, "exponential(rate={rate})"),
            Tail::NoDecay => f.write_str("none"),
        }
    }
}

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Built-in weight families plus an escape hatch for user closures.
#[derive(Clone)]
pub enum WeightKind {
    Zero,
    Constant {
        c: f64,
    },
    /// `c·(1 + r²)^{−m}`
    Power {
        c: f64,
        m: f64,
    },
    /// `c·e^{−λr}`
    Exponential {
        c: f64,
        rate: f64,
    },
    /// `c·(1 − (r/R)²)²` on `[0, R)`, zero beyond.
    Bump {
        c: f64,
        radius: f64,
    },
    /// `c0 + c2·r²`
    Quadratic {
        c0: f64,
        c2: f64,
    },
    /// Pointwise sum of two weights.
    Sum(Arc<(Weight, Weight)>),
    Custom(RadialFn),
}

impl fmt::Debug for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::Zero => f.write_str("Zero"),
            WeightKind::Constant { c } => write!(f, "Constant({c})"),
            WeightKind::Power { c, m } => write!(f, "Power({c}, {m})"),
            WeightKind::Exponential { c, rate } => write!(f, "Exponential({c}, {rate})"),
            WeightKind::Bump { c, radius } => write!(f, "Bump({c}, {radius})"),
            WeightKind::Quadratic { c0, c2 } => write!(f, "Quadratic({c0}, {c2})"),
            WeightKind::Sum(parts) => write!(f, "Sum({:?}, {:?})", parts.0.kind, parts.1.kind),
            WeightKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A radial weight `p(r) ≥ 0` with its tail descriptor.
#[derive(Debug, Clone)]
pub struct Weight {
    kind: WeightKind,
    tail: Tail,
    label: String,
}

impl Weight {
    pub fn zero() -> Self {
        Weight {
            kind: WeightKind::Zero,
            tail: Tail::CompactSupport { cutoff: 0.0 },
            label: "zero".into(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Weight {
            kind: WeightKind::Constant { c },
            tail: if c == 0.0 {
                Tail::CompactSupport { cutoff: 0.0 }
            } else {
                Tail::NoDecay
            },
            label: format!("constant(c={c})"),
        }
    }

    pub fn power(c: f64, m: f64) -> Self {
        Weight {
            kind: WeightKind::Power { c, m },
            tail: if m > 0.0 {
                Tail::PowerDecay { kappa: 2.0 * m }
            } else {
                Tail::NoDecay
            },
            label: format!("power(c={c},m={m})"),
        }
    }

    pub fn exponential(c: f64, rate: f64) -> Self {
        Weight {
            kind: WeightKind::Exponential { c, rate },
            tail: if rate > 0.0 {
                Tail::ExponentialDecay { rate }
            } else {
                Tail::NoDecay
            },
            label: format!("exponential(c={c},rate={rate})"),
        }
    }

    pub fn bump(c: f64, radius: f64) -> Self {
        Weight {
            kind: WeightKind::Bump { c, radius },
            tail: Tail::CompactSupport { cutoff: radius },
            label: format!("bump(c={c},radius={radius})"),
        }
    }

    pub fn quadratic(c0: f64, c2: f64) -> Self {
        Weight {
            kind: WeightKind::Quadratic { c0, c2 },
            tail: Tail::NoDecay,
            label: format!("quadratic(c0={c0},c2={c2})"),
        }
    }

    /// A user-supplied evaluator. It must be pure and thread-safe.
    pub fn custom<F>(label: impl Into<String>, tail: Tail, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Weight {
            kind: WeightKind::Custom(Arc::new(f)),
            tail,
            label: label.into(),
        }
    }

    /// Same weight scaled by `k ≥ 0`.
    pub fn scaled(&self, k: f64) -> Self {
        let kind = match &self.kind {
            WeightKind::Zero => WeightKind::Zero,
            WeightKind::Constant { c } => WeightKind::Constant { c: c * k },
            WeightKind::Power { c, m } => WeightKind::Power { c: c * k, m: *m },
            WeightKind::Exponential { c, rate } => WeightKind::Exponential { c: c * k, rate: *rate },
            WeightKind::Bump { c, radius } => WeightKind::Bump {
                c: c * k,
                radius: *radius,
            },
            WeightKind::Quadratic { c0, c2 } => WeightKind::Quadratic { c0: c0 * k, c2: c2 * k },
            WeightKind::Sum(parts) => WeightKind::Sum(Arc::new((parts.0.scaled(k), parts.1.scaled(k)))),
            WeightKind::Custom(f) => {
                let f = f.clone();
                WeightKind::Custom(Arc::new(move |r| k * f(r)))
            }
        };
        Weight {
            kind,
            tail: self.tail,
            label: format!("{k}*{}", self.label),
        }
    }

    /// `p + q`, with the slower of the two tails.
    pub fn sum(p: &Weight, q: &Weight) -> Weight {
        let tail = slower_tail(p.tail, q.tail);
        Weight {
            kind: WeightKind::Sum(Arc::new((p.clone(), q.clone()))),
            tail,
            label: format!("({})+({})", p.label, q.label),
        }
    }

    /// `min(p, q)`, with the faster of the two tails.
    pub fn min(p: &Weight, q: &Weight) -> Weight {
        let (a, b) = (p.clone(), q.clone());
        let tail = match slower_tail(p.tail, q.tail) {
            t if t == p.tail => q.tail,
            _ => p.tail,
        };
        Weight {
            kind: WeightKind::Custom(Arc::new(move |r| a.eval(r).min(b.eval(r)))),
            tail,
            label: format!("min({},{})", p.label, q.label),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match &self.kind {
            WeightKind::Zero => 0.0,
            WeightKind::Constant { c } => *c,
            WeightKind::Power { c, m } => c * math::pow(1.0 + r * r, -m),
            WeightKind::Exponential { c, rate } => c * math::exp(-rate * r),
            WeightKind::Bump { c, radius } => {
                if r < *radius {
                    let x = r / radius;
                    let y = 1.0 - x * x;
                    c * y * y
                } else {
                    0.0
                }
            }
            WeightKind::Quadratic { c0, c2 } => c0 + c2 * r * r,
            WeightKind::Sum(parts) => parts.0.eval(r) + parts.1.eval(r),
            WeightKind::Custom(f) => f(r),
        }
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// True when the evaluator is the zero function by construction.
    pub fn is_trivially_zero(&self) -> bool {
        match &self.kind {
            WeightKind::Zero => true,
            WeightKind::Constant { c } => *c == 0.0,
            WeightKind::Power { c, .. } | WeightKind::Exponential { c, .. } | WeightKind::Bump { c, .. } => *c == 0.0,
            WeightKind::Quadratic { c0, c2 } => *c0 == 0.0 && *c2 == 0.0,
            WeightKind::Sum(parts) => parts.0.is_trivially_zero() && parts.1.is_trivially_zero(),
            WeightKind::Custom(_) => false,
        }
    }

    /// `∫_R^∞ s·w(s) ds` in closed form: exact for the built-in decaying
    /// families and their sums, and from the tail descriptor (treating `w` as exactly
    /// power-law or exponential beyond `R`) otherwise. `None` when the
    /// descriptor does not guarantee convergence.
    pub fn tail_moment(&self, big_r: f64) -> Option<f64> {
        match &self.kind {
            WeightKind::Zero => return Some(0.0),
            WeightKind::Constant { c } if *c == 0.0 => return Some(0.0),
            WeightKind::Power { c, m } if *m > 1.0 => {
                let base = 1.0 + big_r * big_r;
                return Some(c * math::pow(base, 1.0 - m) / (2.0 * (m - 1.0)));
            }
            WeightKind::Exponential { c, rate } if *rate > 0.0 => {
                return Some(c * math::exp(-rate * big_r) * (big_r / rate + 1.0 / (rate * rate)));
            }
            WeightKind::Bump { radius, .. } if big_r >= *radius => return Some(0.0),
            WeightKind::Sum(parts) => {
                if let (Some(a), Some(b)) = (parts.0.tail_moment(big_r), parts.1.tail_moment(big_r)) {
                    return Some(a + b);
                }
            }
            _ => {}
        }
        let w = self.eval(big_r);
        match self.tail {
            Tail::CompactSupport { cutoff } if big_r >= cutoff => Some(0.0),
            Tail::PowerDecay { kappa } if kappa > 2.0 => Some(w * big_r * big_r / (kappa - 2.0)),
            Tail::ExponentialDecay { rate } if rate > 0.0 => Some(w * (big_r / rate + 1.0 / (rate * rate))),
            _ => None,
        }
    }

    /// Whether the tail descriptor guarantees `∫ r·w(r) dr < ∞`.
    pub fn tail_guarantees_finite_moment(&self) -> Option<bool> {
        match self.tail {
            Tail::CompactSupport { .. } | Tail::ExponentialDecay { .. } => Some(true),
            Tail::PowerDecay { kappa } => Some(kappa > 2.0),
            Tail::NoDecay => None,
        }
    }

    /// Cross-checks the tail descriptor against samples on the decade
    /// `[r_hi/10, r_hi]`: the tail-normalised weight `w·r^κ` (or `w·e^{λr}`)
    /// may not grow by more than a factor 100 across the decade, and a
    /// compactly supported weight must vanish past its cutoff.
    pub fn validate_tail(&self, r_hi: f64) -> Result<()> {
        const SAMPLES: usize = 64;
        let lo = r_hi / 10.0;
        let at = |i: usize| lo * math::pow(10.0, i as f64 / (SAMPLES - 1) as f64);
        match self.tail {
            Tail::NoDecay => Ok(()),
            Tail::CompactSupport { cutoff } => {
                let mut r = cutoff.max(lo);
                let step = (r_hi.max(cutoff * 2.0) - r) / SAMPLES as f64;
                for _ in 0..=SAMPLES {
                    let w = self.eval(r);
                    if w != 0.0 {
                        return Err(Error::Hypothesis(format!(
                            "weight {} is {w} at r = {r}, past its declared cutoff {cutoff}",
                            self.label
                        )));
                    }
                    r += step.max(f64::MIN_POSITIVE);
                }
                Ok(())
            }
            Tail::PowerDecay { .. } | Tail::ExponentialDecay { .. } => {
                let normalised = |r: f64| match self.tail {
                    Tail::PowerDecay { kappa } => self.eval(r) * math::pow(r, kappa),
                    Tail::ExponentialDecay { rate } => self.eval(r) * math::exp(rate * r),
                    _ => unreachable!(),
                };
                let first = normalised(at(0));
                let mut worst = first;
                for i in 1..SAMPLES {
                    worst = worst.max(normalised(at(i)));
                }
                let ok = worst.is_finite() && (worst <= 100.0 * first || worst == 0.0);
                if ok {
                    Ok(())
                } else {
                    Err(Error::Hypothesis(format!(
                        "weight {} does not decay like its declared tail {} on [{lo}, {r_hi}]",
                        self.label, self.tail
                    )))
                }
            }
        }
    }
}

fn tail_rank(t: Tail) -> (u8, f64) {
    match t {
        Tail::CompactSupport { cutoff } => (0, -cutoff),
        Tail::ExponentialDecay { rate } => (1, rate),
        Tail::PowerDecay { kappa } => (2, kappa),
        Tail::NoDecay => (3, 0.0),
    }
}

fn slower_tail(a: Tail, b: Tail) -> Tail {
    let (ra, rb) = (tail_rank(a), tail_rank(b));
    if ra.0 != rb.0 {
        return if ra.0 > rb.0 { a } else { b };
    }
    // Same class: larger cutoff, smaller rate, smaller kappa is slower.
    if ra.1 <= rb.1 {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn moment_oracle(w: &Weight, r: f64) -> f64 {
        // Trapezoid on a long uniform grid in log-space.
        let n = 200_000;
        let (a, b) = (r.ln(), (r * 1e4).ln());
        let h = (b - a) / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let t = (a + i as f64 * h).exp();
            let f = t * t * w.eval(t);
            s += if i == 0 || i == n { 0.5 * f } else { f };
        }
        s * h
    }

    #[test]
    fn families_evaluate() {
        assert_eq!(Weight::zero().eval(3.0), 0.0);
        assert_relative_eq!(Weight::power(6.0, 2.0).eval(1.0), 1.5);
        assert_relative_eq!(Weight::exponential(1.0, 1.0).eval(1.0), (-1.0f64).exp());
        assert_relative_eq!(Weight::bump(2.0, 2.0).eval(1.0), 2.0 * 0.75 * 0.75);
        assert_eq!(Weight::bump(2.0, 2.0).eval(2.0), 0.0);
        assert_relative_eq!(Weight::quadratic(6.0, 2.0).eval(2.0), 14.0);
    }

    #[test]
    fn closed_form_tail_moments_match_quadrature() {
        for w in [
            Weight::power(6.0, 2.0),
            Weight::power(1.0, 1.7),
            Weight::exponential(2.0, 0.5),
        ] {
            let r = 5.0;
            assert_relative_eq!(w.tail_moment(r).unwrap(), moment_oracle(&w, r), max_relative = 2e-4);
        }
        assert_eq!(Weight::bump(1.0, 3.0).tail_moment(3.0), Some(0.0));
        assert_eq!(Weight::constant(1.0).tail_moment(3.0), None);
        assert_eq!(Weight::power(1.0, 1.0).tail_moment(3.0), None);
    }

    #[test]
    fn tail_validation_catches_a_lying_descriptor() {
        let honest = Weight::custom("e^-r", Tail::ExponentialDecay { rate: 1.0 }, |r| (-r).exp());
        assert!(honest.validate_tail(50.0).is_ok());
        let liar = Weight::custom("e^-r", Tail::ExponentialDecay { rate: 2.0 }, |r| (-r).exp());
        assert!(liar.validate_tail(50.0).is_err());
        let slow = Weight::custom("r^-2", Tail::PowerDecay { kappa: 4.0 }, |r| 1.0 / (1.0 + r * r));
        assert!(slow.validate_tail(100.0).is_err());
        let bad_cut = Weight::custom("1", Tail::CompactSupport { cutoff: 1.0 }, |_| 1.0);
        assert!(bad_cut.validate_tail(10.0).is_err());
        assert!(Weight::bump(1.0, 1.0).validate_tail(10.0).is_ok());
    }

    #[test]
    fn sum_and_min_keep_conservative_tails() {
        let p = Weight::exponential(1.0, 1.0);
        let q = Weight::power(1.0, 2.0);
        assert_eq!(Weight::sum(&p, &q).tail(), Tail::PowerDecay { kappa: 4.0 });
        assert_eq!(Weight::min(&p, &q).tail(), Tail::ExponentialDecay { rate: 1.0 });
        assert_relative_eq!(Weight::sum(&p, &q).eval(1.0), (-1.0f64).exp() + 0.25);
        let s = Weight::sum(&p, &q);
        assert_relative_eq!(s.tail_moment(5.0).unwrap(), moment_oracle(&s, 5.0), max_relative = 2e-4);
        assert_relative_eq!(
            s.scaled(2.0).tail_moment(5.0).unwrap(),
            2.0 * s.tail_moment(5.0).unwrap()
        );
    }
}
