//! Adaptive Gauss–Kronrod quadrature, fixed Gauss–Legendre rules, and the
//! decade-probing rule used to decide whether an improper integral converges.

use alloc::vec::Vec;

use crate::math;

/// Outcome of an improper integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralVerdict {
    Finite {
        value: f64,
        error: f64,
    },
    /// The partial integrals failed to decay geometrically. `partial` is the
    /// accumulated value up to `probed_to`.
    Infinite {
        partial: f64,
        probed_to: f64,
    },
}

impl IntegralVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, IntegralVerdict::Finite { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            IntegralVerdict::Finite { value, .. } => Some(value),
            IntegralVerdict::Infinite { .. } => None,
        }
    }

    pub fn error(&self) -> Option<f64> {
        match *self {
            IntegralVerdict::Finite { error, .. } => Some(error),
            IntegralVerdict::Infinite { .. } => None,
        }
    }

    pub fn value_or_inf(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Result of a finite-interval adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss–Kronrod (7/15) on `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol·|value|)` or `max_intervals` is
/// reached. Deterministic: ties resolve to the leftmost interval.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Quadrature {
    if a == b {
        return Quadrature { value: 0.0, error: 0.0 };
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts: Vec<(f64, f64, f64, f64)> = alloc::vec![(a, b, v, e)];
    let mut value = v;
    let mut error = e;
    while error > abs_tol.max(rel_tol * value.abs()) && parts.len() < max_intervals {
        let mut worst = 0;
        for (i, p) in parts.iter().enumerate() {
            if p.3 > parts[worst].3 {
                worst = i;
            }
        }
        let (lo, hi, pv, pe) = parts[worst];
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (lv, le) = gk15(&f, lo, mid);
        let (rv, re) = gk15(&f, mid, hi);
        parts[worst] = (lo, mid, lv, le);
        parts.push((mid, hi, rv, re));
        value += lv + rv - pv;
        error += le + re - pe;
    }
    // Re-sum to shed the drift of the incremental updates.
    let value = parts.iter().map(|p| p.2).sum();
    let error = parts.iter().map(|p| p.3).sum();
    Quadrature { value, error }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`, computed by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre_unit(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; m];
    let mut weights = alloc::vec![0.0; m];
    for i in 0..m {
        let mut x = math::cos(core::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Rules for declaring an improper integral finite or infinite from its
/// partial sums over consecutive decades.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecadeRule {
    /// A decade piece must be below this fraction of its predecessor to count
    /// as geometric decay.
    pub decay_ratio: f64,
    /// Consecutive decades required for either verdict.
    pub run_length: usize,
    /// Stop once the geometric tail estimate is below this fraction of the sum.
    pub rel_tol: f64,
    /// Largest upper limit probed.
    pub upper_probe: f64,
}

impl Default for DecadeRule {
    fn default() -> Self {
        DecadeRule {
            decay_ratio: 0.9,
            run_length: 3,
            rel_tol: 1e-13,
            upper_probe: 1e100,
        }
    }
}

/// Sum `piece(lo, hi)` over `[start·10^k, start·10^{k+1}]`, k = 0, 1, …, and
/// apply the decade rule. `piece` returns the integral over its interval and
/// an error estimate.
pub fn decade_series<P>(start: f64, rule: &DecadeRule, mut piece: P) -> IntegralVerdict
where
    P: FnMut(f64, f64) -> Quadrature,
{
    debug_assert!(start > 0.0);
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut prev: Option<f64> = None;
    let mut slow_run = 0usize;
    let mut fast_run = 0usize;
    let mut last_ratio = 1.0;
    let mut lo = start;
    loop {
        let hi = lo * 10.0;
        let q = piece(lo, hi);
        sum += q.value;
        err += q.error;
        if let Some(p) = prev {
            let ratio = if p > 0.0 {
                q.value / p
            } else if q.value > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            last_ratio = ratio;
            if ratio >= rule.decay_ratio {
                slow_run += 1;
                fast_run = 0;
            } else {
                fast_run += 1;
                slow_run = 0;
            }
        }
        prev = Some(q.value);
        if slow_run >= rule.run_length {
            return IntegralVerdict::Infinite {
                partial: sum,
                probed_to: hi,
            };
        }
        if fast_run >= rule.run_length {
            let tail = q.value * last_ratio / (1.0 - last_ratio);
            if q.value == 0.0 || tail <= rule.rel_tol * sum.abs() {
                return IntegralVerdict::Finite {
                    value: sum + tail,
                    error: err + tail.abs(),
                };
            }
        }
        if hi >= rule.upper_probe || !sum.is_finite() {
            if fast_run >= rule.run_length || (prev == Some(0.0)) {
                let tail = q.value * last_ratio / (1.0 - last_ratio);
                return IntegralVerdict::Finite {
                    value: sum + tail,
                    error: err + tail.abs(),
                };
            }
            return IntegralVerdict::Infinite {
                partial: sum,
                probed_to: hi,
            };
        }
        lo = hi;
    }
}

/// `∫_a^∞ g(t) dt` for a nonnegative, eventually monotone integrand, integrated
/// decade by decade in the logarithmic variable.
pub fn tail_integral<G: Fn(f64) -> f64>(g: G, a: f64, rule: &DecadeRule) -> IntegralVerdict {
    decade_series(a, rule, |lo, hi| {
        integrate(
            |y| {
                let t = math::exp(y);
                g(t) * t
            },
            math::ln(lo),
            math::ln(hi),
            0.0,
            1e-13,
            200,
        )
    })
}
