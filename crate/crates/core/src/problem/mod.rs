//! Problem data: weights, nonlinearities, dimension, radial grids and the
//! Green-type potentials built from them.

mod grid;
mod nonlinear;
pub mod potential;
mod weight;

use alloc::format;
use alloc::string::String;

pub use grid::RadialGrid;
pub use nonlinear::{
    for_lattice, Envelope, NonlinearPair, Nonlinearity, PairFn, ScalarFn, ScalarMap, DEFAULT_ETA, LATTICE_EXTENT,
    LATTICE_POINTS,
};
pub use potential::{
    potential, potential_infinity, potential_infinity_fubini, potential_profile, potential_remainder, q_infinity,
    q_profile, q_truncated, PotentialValue,
};
pub use weight::{RadialFn, Tail, Weight, WeightKind};

use crate::error::{Error, Result};

/// The full data of the radial system `Δu = p f(u,v)`, `Δv = q g(u,v)` in `ℝⁿ`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub n: u32,
    pub p: Weight,
    pub q: Weight,
    pub nonlin: NonlinearPair,
}

impl ProblemSpec {
    /// Only the dimension is enforced here; the remaining standing
    /// hypotheses are reported by `verify::validate_hypotheses`, and the
    /// solver checks the structural ones it depends on.
    pub fn new(n: u32, p: Weight, q: Weight, nonlin: NonlinearPair) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!("dimension must be at least 3, got {n}")));
        }
        Ok(ProblemSpec { n, p, q, nonlin })
    }

    /// Checks what the monotone iteration needs on the sample lattice and the
    /// radii it will touch: nonnegative weights, `f(0,0) = g(0,0) = 0`, and
    /// `f`, `g` nonnegative and nondecreasing.
    pub fn check_structure(&self, radii: &[f64]) -> Result<()> {
        for &r in radii {
            let (p, q) = (self.p.eval(r), self.q.eval(r));
            if !(p >= 0.0 && q >= 0.0) {
                return Err(Error::Hypothesis(format!("negative or non-finite weight at r = {r}")));
            }
        }
        let nl = &self.nonlin;
        if nl.f(0.0, 0.0) != 0.0 || nl.g(0.0, 0.0) != 0.0 {
            return Err(Error::Hypothesis("f and g must vanish at (0, 0)".into()));
        }
        if let Some((s, t)) = monotonicity_violation(nl) {
            return Err(Error::Hypothesis(format!("f or g decreases near (s, t) = ({s}, {t})")));
        }
        Ok(())
    }

    /// Canonical one-line description used for digests and reports.
    pub fn describe(&self) -> String {
        format!(
            "n={};p={}[{}];q={}[{}];{}",
            self.n,
            self.p.label(),
            self.p.tail(),
            self.q.label(),
            self.q.tail(),
            self.nonlin.describe()
        )
    }

    /// The same problem with `(u, v)`, `(p, q)` and `(f, g)` swapped.
    pub fn swapped(&self) -> ProblemSpec {
        let (f, g) = (self.nonlin.f.clone(), self.nonlin.g.clone());
        let sw = |h: Nonlinearity| Nonlinearity::custom(format!("swap({})", h.label()), move |s, t| h.eval(t, s));
        ProblemSpec {
            n: self.n,
            p: self.q.clone(),
            q: self.p.clone(),
            nonlin: NonlinearPair::new(sw(g), sw(f)),
        }
    }
}

/// First lattice point where `f` or `g` decreases along a coordinate step,
/// checked exactly on the `50 × 50` lattice of `[0, 10]²`.
pub fn monotonicity_violation(nl: &NonlinearPair) -> Option<(f64, f64)> {
    let step = LATTICE_EXTENT / (LATTICE_POINTS - 1) as f64;
    let at = |i: usize| i as f64 * step;
    for i in 0..LATTICE_POINTS {
        for j in 0..LATTICE_POINTS {
            let (s, t) = (at(i), at(j));
            let (f0, g0) = (nl.f(s, t), nl.g(s, t));
            if !(f0 >= 0.0 && g0 >= 0.0) {
                return Some((s, t));
            }
            if i + 1 < LATTICE_POINTS {
                let s1 = at(i + 1);
                if nl.f(s1, t) < f0 || nl.g(s1, t) < g0 {
                    return Some((s, t));
                }
            }
            if j + 1 < LATTICE_POINTS {
                let t1 = at(j + 1);
                if nl.f(s, t1) < f0 || nl.g(s, t1) < g0 {
                    return Some((s, t));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_2222() -> ProblemSpec {
        ProblemSpec::new(
            3,
            Weight::exponential(1.0, 1.0),
            Weight::exponential(1.0, 1.0),
            NonlinearPair::power(1.0, 2.0, 2.0, 1.0, 2.0, 2.0),
        )
        .unwrap()
    }

    #[test]
    fn dimension_below_three_rejected() {
        let nl = NonlinearPair::power(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        assert!(ProblemSpec::new(2, Weight::zero(), Weight::zero(), nl).is_err());
    }

    #[test]
    fn structure_checks() {
        let spec = power_2222();
        assert!(spec.check_structure(&[0.0, 1.0, 2.0]).is_ok());
        let bad = ProblemSpec::new(
            3,
            Weight::custom("neg", Tail::NoDecay, |r| 1.0 - r),
            Weight::zero(),
            spec.nonlin.clone(),
        )
        .unwrap();
        assert!(bad.check_structure(&[0.0, 2.0]).is_err());
        let decreasing = NonlinearPair::new(
            Nonlinearity::custom("s(5-t)", |s, t| s * (5.0 - t).max(0.0)),
            Nonlinearity::power(1.0, 1.0, 1.0),
        );
        let bad = ProblemSpec::new(3, Weight::zero(), Weight::zero(), decreasing).unwrap();
        assert!(bad.check_structure(&[0.0]).is_err());
        let offset = NonlinearPair::power(1.0, 0.0, 0.0, 1.0, 1.0, 1.0);
        let bad = ProblemSpec::new(3, Weight::zero(), Weight::zero(), offset).unwrap();
        assert!(bad.check_structure(&[0.0]).is_err());
    }

    #[test]
    fn swapping_twice_is_identity_on_values() {
        let spec = ProblemSpec::new(
            3,
            Weight::exponential(1.0, 1.0),
            Weight::power(1.0, 2.0),
            NonlinearPair::power(1.0, 2.0, 1.0, 3.0, 1.0, 3.0),
        )
        .unwrap();
        let sw = spec.swapped().swapped();
        for (s, t) in [(0.5, 2.0), (3.0, 1.0)] {
            assert_eq!(sw.nonlin.f(s, t), spec.nonlin.f(s, t));
            assert_eq!(sw.nonlin.g(s, t), spec.nonlin.g(s, t));
        }
        assert_eq!(spec.swapped().nonlin.f(2.0, 1.0), spec.nonlin.g(1.0, 2.0));
    }

    #[test]
    fn description_is_stable() {
        assert_eq!(power_2222().describe(), power_2222().describe());
        assert!(power_2222().describe().starts_with("n=3;p=exponential(c=1,rate=1)"));
    }
}
