use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use crate::math;

pub type PairFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One component nonlinearity `f(s, t) ≥ 0`.
#[derive(Clone)]
pub enum Nonlinearity {
    /// `coef·sᵃ·tᵇ`
    Power {
        coef: f64,
        a: f64,
        b: f64,
    },
    Custom {
        label: String,
        eval: PairFn,
    },
}

impl Nonlinearity {
    pub fn power(coef: f64, a: f64, b: f64) -> Self {
        Nonlinearity::Power { coef, a, b }
    }

    pub fn custom<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Nonlinearity::Custom {
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    /// Evaluates at `(s, t)`, both expected `≥ 0`. Power families are
    /// computed with products and `sqrt` only for integer and half-integer
    /// exponents, so they stay monotone in floating point.
    #[inline]
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        match self {
            Nonlinearity::Power { coef, a, b } => coef * math::pow_nonneg(s, *a) * math::pow_nonneg(t, *b),
            Nonlinearity::Custom { eval, .. } => eval(s, t),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Nonlinearity::Power { coef, a, b } => format!("{coef}*s^{a}*t^{b}"),
            Nonlinearity::Custom { label, .. } => label.clone(),
        }
    }
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A scalar map `[0, ∞) → [0, ∞)`, used for envelopes and KO integrands.
#[derive(Clone)]
pub enum ScalarMap {
    /// `coef·s^exponent`
    Power {
        coef: f64,
        exponent: f64,
    },
    Custom {
        label: String,
        eval: ScalarFn,
    },
}

impl ScalarMap {
    pub fn power(coef: f64, exponent: f64) -> Self {
        ScalarMap::Power { coef, exponent }
    }

    pub fn custom<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScalarMap::Custom {
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ScalarMap::Power { coef, exponent } => coef * math::pow_nonneg(s, *exponent),
            ScalarMap::Custom { eval, .. } => eval(s),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ScalarMap::Power { coef, exponent } => format!("{coef}*s^{exponent}"),
            ScalarMap::Custom { label, .. } => label.clone(),
        }
    }
}

impl fmt::Debug for ScalarMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub const DEFAULT_ETA: f64 = 1e-3;

/// Lower envelope `h` with `f(s,t) + g(s,t) ≥ h(s + t)` for `s, t ≥ η`.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub h: ScalarMap,
    pub eta: f64,
}

impl Envelope {
    pub fn new(h: ScalarMap, eta: Option<f64>) -> Self {
        Envelope {
            h,
            eta: eta.unwrap_or(DEFAULT_ETA),
        }
    }
}

/// Side length and resolution of the sample lattice for the envelope and
/// monotonicity checks.
pub const LATTICE_EXTENT: f64 = 10.0;
pub const LATTICE_POINTS: usize = 50;

#[derive(Debug, Clone)]
pub struct NonlinearPair {
    pub f: Nonlinearity,
    pub g: Nonlinearity,
    envelope: Option<Envelope>,
}

impl NonlinearPair {
    pub fn new(f: Nonlinearity, g: Nonlinearity) -> Self {
        NonlinearPair { f, g, envelope: None }
    }

    /// `f = c₁sᵃtᵇ`, `g = c₂sᶜtᵈ`.
    pub fn power(c1: f64, a: f64, b: f64, c2: f64, c: f64, d: f64) -> Self {
        Self::new(Nonlinearity::power(c1, a, b), Nonlinearity::power(c2, c, d))
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = Some(envelope);
        self
    }

    #[inline]
    pub fn f(&self, s: f64, t: f64) -> f64 {
        self.f.eval(s, t)
    }

    #[inline]
    pub fn g(&self, s: f64, t: f64) -> f64 {
        self.g.eval(s, t)
    }

    /// `S(t) = f(t,t) + g(t,t)`.
    #[inline]
    pub fn diagonal_sum(&self, t: f64) -> f64 {
        self.f(t, t) + self.g(t, t)
    }

    /// `(a, b, c, d)` when both components are power laws.
    pub fn power_exponents(&self) -> Option<(f64, f64, f64, f64)> {
        match (&self.f, &self.g) {
            (Nonlinearity::Power { a, b, .. }, Nonlinearity::Power { a: c, b: d, .. }) => Some((*a, *b, *c, *d)),
            _ => None,
        }
    }

    /// The user-supplied envelope, if any.
    pub fn explicit_envelope(&self) -> Option<&Envelope> {
        self.envelope.as_ref()
    }

    /// The user envelope, or for power pairs `h(s) = C·s^{min(a+b, c+d)}` with
    /// the largest `C` for which the envelope inequality holds on the sample
    /// lattice `η + [0, 10]²`.
    pub fn envelope(&self) -> Option<Envelope> {
        if let Some(e) = &self.envelope {
            return Some(e.clone());
        }
        let (a, b, c, d) = self.power_exponents()?;
        let gamma = (a + b).min(c + d);
        let eta = DEFAULT_ETA;
        let mut coef = f64::INFINITY;
        for_lattice(eta, |s, t| {
            let h1 = math::pow_nonneg(s + t, gamma);
            if h1 > 0.0 {
                coef = coef.min((self.f(s, t) + self.g(s, t)) / h1);
            }
        });
        if !(coef.is_finite() && coef > 0.0) {
            return None;
        }
        // Shave a few ulps so the lattice check is not decided by rounding.
        let coef = coef * (1.0 - 1e-12);
        Some(Envelope {
            h: ScalarMap::power(coef, gamma),
            eta,
        })
    }

    pub fn describe(&self) -> String {
        let env = match &self.envelope {
            Some(e) => format!("{}@eta={}", e.h.label(), e.eta),
            None => "default".into(),
        };
        format!("f={};g={};envelope={}", self.f.label(), self.g.label(), env)
    }
}

/// Visits the `LATTICE_POINTS²` lattice `offset + [0, LATTICE_EXTENT]²`.
pub fn for_lattice<F: FnMut(f64, f64)>(offset: f64, mut visit: F) {
    let step = LATTICE_EXTENT / (LATTICE_POINTS - 1) as f64;
    for i in 0..LATTICE_POINTS {
        for j in 0..LATTICE_POINTS {
            visit(offset + i as f64 * step, offset + j as f64 * step);
        }
    }
}
