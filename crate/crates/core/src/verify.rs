//! Checks on problem data and on computed solutions: the hypothesis
//! checklist, radial residuals, the transform lower bound for `u + v`, and
//! growth fits for the divergence dichotomy.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::ko;
use crate::math;
use crate::numerics::fit::{loglog_last_decade, LineFit};
use crate::numerics::quad::IntegralVerdict;
use crate::problem::{self, for_lattice, monotonicity_violation, ProblemSpec, RadialGrid, Weight};
use crate::solver::SolutionPair;

/// Fitted exponents whose 95% band lies above this count as divergent.
pub const DIVERGENCE_MARGIN: f64 = 0.05;

/// Radii beyond which weights are sampled for the checklist.
const SAMPLE_RADIUS: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckLine {
    pub clause: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisReport {
    pub lines: Vec<CheckLine>,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn line(&self, clause: &str) -> Option<&CheckLine> {
        self.lines.iter().find(|l| l.clause == clause)
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(
                f,
                "{}: {} ({})",
                l.clause,
                if l.passed { "pass" } else { "FAIL" },
                l.detail
            )?;
        }
        Ok(())
    }
}

fn verdict_text(v: &IntegralVerdict) -> String {
    match v {
        IntegralVerdict::Finite { value, error } => format!("finite {value:.10e} ± {error:.1e}"),
        IntegralVerdict::Infinite { partial, probed_to } => {
            format!("infinite (partial {partial:.3e} up to {probed_to:.1e})")
        }
    }
}

/// One line per testable clause of the standing hypotheses. Failures are
/// report lines, never errors.
pub fn validate_hypotheses(spec: &ProblemSpec) -> HypothesisReport {
    let mut lines = Vec::new();
    let mut push =
        |clause: &'static str, passed: bool, detail: String| lines.push(CheckLine { clause, passed, detail });
    let radii = RadialGrid::graded(SAMPLE_RADIUS, 1e-2)
        .map(|g| g.radii().to_vec())
        .unwrap_or_default();

    for (name, w) in [("p", &spec.p), ("q", &spec.q)] {
        let bad = radii.iter().find(|&&r| !(w.eval(r) >= 0.0));
        push(
            if name == "p" {
                "weight p nonnegative"
            } else {
                "weight q nonnegative"
            },
            bad.is_none(),
            match bad {
                Some(r) => format!("{} = {} at r = {r}", name, w.eval(*r)),
                None => format!("{} samples on [0, {SAMPLE_RADIUS}]", radii.len()),
            },
        );
        let tail = w.validate_tail(SAMPLE_RADIUS);
        push(
            if name == "p" {
                "tail of p consistent"
            } else {
                "tail of q consistent"
            },
            tail.is_ok(),
            match tail {
                Ok(()) => format!("{}", w.tail()),
                Err(e) => format!("{e}"),
            },
        );
        let pinf = problem::potential_infinity(w, spec.n);
        let (ok, detail) = match &pinf {
            Ok(v) => (v.is_finite(), verdict_text(v)),
            Err(e) => (false, format!("{e}")),
        };
        push(
            if name == "p" {
                "potential P(inf) finite"
            } else {
                "potential Q(inf) finite"
            },
            ok,
            detail,
        );
    }

    let nontrivial = radii.iter().any(|&r| spec.p.eval(r) > 0.0 || spec.q.eval(r) > 0.0);
    push(
        "weights not both zero",
        nontrivial,
        String::from(if nontrivial {
            "some sample positive"
        } else {
            "p = q = 0 at every sample"
        }),
    );
    let both = radii.iter().find(|&&r| spec.p.eval(r) > 0.0 && spec.q.eval(r) > 0.0);
    push(
        "min(p, q) positive somewhere",
        both.is_some(),
        match both {
            Some(r) => format!("first at r = {r}; non-compactness of min(p, q) is not decidable from samples"),
            None => "min(p, q) = 0 at every sample".into(),
        },
    );

    let nl = &spec.nonlin;
    let (f0, g0) = (nl.f(0.0, 0.0), nl.g(0.0, 0.0));
    push(
        "f, g vanish at origin",
        f0 == 0.0 && g0 == 0.0,
        format!("f(0,0) = {f0}, g(0,0) = {g0}"),
    );
    let mono = monotonicity_violation(nl);
    push(
        "f, g nondecreasing",
        mono.is_none(),
        match mono {
            Some((s, t)) => format!("violation at ({s}, {t})"),
            None => "exact on the 50x50 lattice of [0, 10]^2".into(),
        },
    );

    match nl.envelope() {
        None => {
            push(
                "envelope inequality",
                false,
                "no envelope supplied and f, g are not power laws".into(),
            );
            push("envelope KO integral finite", false, "no envelope".into());
        }
        Some(env) => {
            let mut worst: Option<(f64, f64)> = None;
            for_lattice(env.eta, |s, t| {
                if worst.is_none() && nl.f(s, t) + nl.g(s, t) < env.h.eval(s + t) {
                    worst = Some((s, t));
                }
            });
            push(
                "envelope inequality",
                worst.is_none(),
                match worst {
                    Some((s, t)) => format!("f + g < h(s + t) at ({s}, {t})"),
                    None => format!("h = {} holds on eta + [0, 10]^2, eta = {}", env.h.label(), env.eta),
                },
            );
            let ko = ko::ko_integral_with(|z| env.h.eval(z), &ko::KoOptions::default());
            let (ok, detail) = match &ko {
                Ok(v) => (v.is_finite(), verdict_text(v)),
                Err(e) => (false, format!("{e}")),
            };
            push("envelope KO integral finite", ok, detail);
        }
    }
    HypothesisReport { lines }
}

/// Pointwise residual of the radial equations.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub radii: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub max_u: f64,
    pub max_v: f64,
    pub argmax_u: f64,
    pub argmax_v: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.max_u.max(self.max_v)
    }
}

/// Flux-form radial Laplacian at interior node `i`:
/// `(r_{i+½}^{n−1}·D⁺x − r_{i−½}^{n−1}·D⁻x) / (r_i^{n−1}·(h⁺ + h⁻)/2)`.
fn radial_laplacian(r: &[f64], x: &[f64], i: usize, n: u32) -> f64 {
    let (hm, hp) = (r[i] - r[i - 1], r[i + 1] - r[i]);
    let (rm, rp) = (0.5 * (r[i] + r[i - 1]), 0.5 * (r[i + 1] + r[i]));
    let k = n - 1;
    let flux_p = math::powi(rp, k) * (x[i + 1] - x[i]) / hp;
    let flux_m = math::powi(rm, k) * (x[i] - x[i - 1]) / hm;
    (flux_p - flux_m) / (math::powi(r[i], k) * 0.5 * (hp + hm))
}

pub(crate) fn max_residual(radii: &[f64], u: &[f64], v: &[f64], spec: &ProblemSpec, r_from: f64) -> Option<f64> {
    residual_on(radii, u, v, spec, r_from).ok().map(|r| r.max())
}

fn residual_on(radii: &[f64], u: &[f64], v: &[f64], spec: &ProblemSpec, r_from: f64) -> Result<ResidualReport> {
    let m = radii.len().min(u.len()).min(v.len());
    if m < 5 {
        return Err(Error::InsufficientDomain(format!(
            "residual needs at least 5 nodes, got {m}"
        )));
    }
    let first = radii[..m].partition_point(|&r| r < r_from).max(1);
    if first + 1 >= m {
        return Err(Error::InsufficientDomain(format!(
            "no interior node beyond r = {r_from}"
        )));
    }
    let mut out = ResidualReport {
        radii: Vec::new(),
        u: Vec::new(),
        v: Vec::new(),
        max_u: 0.0,
        max_v: 0.0,
        argmax_u: radii[first],
        argmax_v: radii[first],
    };
    let nl = &spec.nonlin;
    for i in first..m - 1 {
        let r = radii[i];
        let ru = radial_laplacian(radii, u, i, spec.n) - spec.p.eval(r) * nl.f(u[i], v[i]);
        let rv = radial_laplacian(radii, v, i, spec.n) - spec.q.eval(r) * nl.g(u[i], v[i]);
        if ru.abs() > out.max_u {
            out.max_u = ru.abs();
            out.argmax_u = r;
        }
        if rv.abs() > out.max_v {
            out.max_v = rv.abs();
            out.argmax_v = r;
        }
        out.radii.push(r);
        out.u.push(ru);
        out.v.push(rv);
    }
    Ok(out)
}

/// Residuals at interior nodes with `r ≥ r_max/10`. The stencil is centred,
/// so its truncation error is `O(h²/r²)` and the origin is excluded.
pub fn residual(sol: &SolutionPair, spec: &ProblemSpec) -> Result<ResidualReport> {
    residual_from(sol, spec, 0.1 * sol.grid.r_max())
}

pub fn residual_from(sol: &SolutionPair, spec: &ProblemSpec, r_from: f64) -> Result<ResidualReport> {
    residual_on(sol.grid.radii(), &sol.u, &sol.v, spec, r_from)
}

/// Largest value of `Δ_h(u+v) − (p+q)·S(u+v)` over interior nodes with
/// `r ≥ r_from`. Nonpositive up to the residual for solutions of the system.
pub fn scalar_inequality_gap(sol: &SolutionPair, spec: &ProblemSpec, r_from: f64) -> Result<f64> {
    let r = sol.grid.radii();
    let w = sol.w();
    let first = r.partition_point(|&x| x < r_from).max(1);
    if r.len() < 5 || first + 1 >= r.len() {
        return Err(Error::InsufficientDomain(
            "scalar inequality needs interior nodes".into(),
        ));
    }
    let mut gap = f64::NEG_INFINITY;
    for i in first..r.len() - 1 {
        let lap = radial_laplacian(r, &w, i, spec.n);
        let rhs = (spec.p.eval(r[i]) + spec.q.eval(r[i])) * spec.nonlin.diagonal_sum(w[i]);
        gap = gap.max(lap - rhs);
    }
    Ok(gap)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    pub radii: Vec<f64>,
    /// `W(r) = u(r) + v(r)`.
    pub lhs: Vec<f64>,
    /// `H⁻¹` of the remaining combined potential beyond `r`.
    pub rhs: Vec<f64>,
    pub margin: Vec<f64>,
    /// Smallest sampled radius from which the margin stays nonnegative;
    /// `None` when the last margin is negative.
    pub applicable_from: Option<f64>,
}

impl LowerBoundReport {
    /// Smallest margin at sampled radii `≥ applicable_from`.
    pub fn worst_margin_applicable(&self) -> Option<f64> {
        let from = self.applicable_from?;
        self.radii
            .iter()
            .zip(&self.margin)
            .filter(|(r, _)| **r >= from)
            .map(|(_, m)| *m)
            .reduce(f64::min)
    }

    pub fn worst_margin(&self) -> f64 {
        self.margin.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Samples at most this many grid nodes for the lower bound.
pub const LOWER_BOUND_SAMPLES: usize = 256;

/// Compares `W = u + v` with `H⁻¹(R(r))`, where `R(r) = P_{p+q}(∞) − P_{p+q}(r)`
/// is the remaining combined potential, on grid nodes `r ≥ r_from`.
///
/// Returns [`Error::Inapplicable`] when the bound is vacuous: `H` infinite, or
/// a remaining potential of zero (the inverse is unbounded there).
pub fn check_lower_bound(sol: &SolutionPair, spec: &ProblemSpec, r_from: f64) -> Result<LowerBoundReport> {
    let radii = sol.grid.radii();
    let first = radii.partition_point(|&r| r < r_from.max(f64::MIN_POSITIVE));
    if first >= radii.len() {
        return Err(Error::InsufficientDomain(format!("no grid node beyond r = {r_from}")));
    }
    let avail = radii.len() - first;
    let count = avail.min(LOWER_BOUND_SAMPLES);
    let mut idx: Vec<usize> = (0..count)
        .map(|j| first + if count > 1 { j * (avail - 1) / (count - 1) } else { 0 })
        .collect();
    idx.dedup();
    let sample_r: Vec<f64> = idx.iter().map(|&i| radii[i]).collect();
    let w = Weight::sum(&spec.p, &spec.q);
    let remaining = problem::potential_remainder(&w, &sample_r, spec.n)?;
    let mut rhs = Vec::with_capacity(idx.len());
    for &y in &remaining {
        if !(y > 0.0) {
            return Err(Error::Inapplicable(
                "remaining potential is zero; H⁻¹ is unbounded there and the bound is vacuous".into(),
            ));
        }
        rhs.push(match ko::inverse_h(&spec.nonlin, y, 1e-10) {
            Ok(s) => s,
            // Beyond the attainable range the bound asks for less than S_MIN.
            Err(Error::OutOfRange { .. }) => ko::S_MIN,
            Err(e) => return Err(e),
        });
    }
    let lhs: Vec<f64> = idx.iter().map(|&i| sol.u[i] + sol.v[i]).collect();
    let margin: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let applicable_from = match margin.iter().rposition(|&m| m < 0.0) {
        None => sample_r.first().copied(),
        Some(k) if k + 1 < sample_r.len() => Some(sample_r[k + 1]),
        Some(_) => None,
    };
    Ok(LowerBoundReport {
        radii: sample_r,
        lhs,
        rhs,
        margin,
        applicable_from,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthVerdict {
    pub fit: Option<LineFit>,
    /// The lower end of the 95% band of the fitted exponent exceeds
    /// [`DIVERGENCE_MARGIN`].
    pub diverges: bool,
}

impl GrowthVerdict {
    fn from_fit(fit: Option<LineFit>) -> Self {
        let diverges = fit.is_some_and(|f| f.band95().0 > DIVERGENCE_MARGIN);
        GrowthVerdict { fit, diverges }
    }

    /// The 95% band excludes 0.
    pub fn band_excludes_zero(&self) -> bool {
        self.fit.is_some_and(|f| {
            let (lo, hi) = f.band95();
            lo > 0.0 || hi < 0.0
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceReport {
    pub u: GrowthVerdict,
    pub v: GrowthVerdict,
    pub w: GrowthVerdict,
    pub f_inf_finite: bool,
    pub g_inf_finite: bool,
}

impl DivergenceReport {
    pub fn at_least_one(&self) -> bool {
        self.u.diverges || self.v.diverges
    }

    /// Both diagonal integrals finite, so both components should diverge.
    pub fn both_expected(&self) -> bool {
        self.f_inf_finite && self.g_inf_finite
    }

    /// At least one component diverges, and both do when both diagonal
    /// integrals are finite.
    pub fn consistent(&self) -> bool {
        self.at_least_one() && (!self.both_expected() || (self.u.diverges && self.v.diverges))
    }

    /// Neither component grows: such data lies inside the admissible set,
    /// not on its edge.
    pub fn interior_like(&self) -> bool {
        !self.u.diverges && !self.v.diverges
    }
}

/// Fits log–log growth of `u`, `v` and `u + v` over the last decade of the
/// grid. Needs at least two decades of positive radii.
pub fn check_divergence(sol: &SolutionPair, spec: &ProblemSpec) -> Result<DivergenceReport> {
    let radii = sol.grid.radii();
    let r_min = radii.get(1).copied().unwrap_or(0.0);
    let r_max = sol.grid.r_max();
    if !(r_min > 0.0 && r_max >= 100.0 * r_min) {
        return Err(Error::InsufficientDomain(format!(
            "growth fits need two decades of radius, grid spans [{r_min}, {r_max}]"
        )));
    }
    let ko = ko::ko_report_with(&spec.nonlin, None, &ko::KoOptions::default())?;
    let fit = |x: &[f64]| GrowthVerdict::from_fit(loglog_last_decade(radii, x, 200));
    Ok(DivergenceReport {
        u: fit(&sol.u),
        v: fit(&sol.v),
        w: fit(&sol.w()),
        f_inf_finite: ko.f_inf.is_finite(),
        g_inf_finite: ko.g_inf.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Envelope, NonlinearPair, ScalarMap, Tail};
    use crate::solver::{monotone_iterate, ClassifyOutcome, SolverConfig};
    use approx::assert_relative_eq;

    fn manufactured() -> ProblemSpec {
        ProblemSpec::new(
            3,
            Weight::power(6.0, 2.0),
            Weight::power(6.0, 2.0),
            NonlinearPair::power(1.0, 1.0, 1.0, 1.0, 1.0, 1.0),
        )
        .unwrap()
    }

    fn pair_from(grid: RadialGrid, u: Vec<f64>, v: Vec<f64>) -> SolutionPair {
        SolutionPair {
            alpha: u[0],
            beta: v[0],
            grid,
            u,
            v,
            status: ClassifyOutcome::Entire {
                sup: 0.0,
                growth_exponent: None,
            },
            iterations_used: 0,
            residual: None,
            monotonicity_violations: 0,
            clamped: false,
        }
    }

    fn closed_form(h: f64, r_max: f64, f: impl Fn(f64) -> f64) -> SolutionPair {
        let grid = RadialGrid::uniform(r_max, h).unwrap();
        let u: Vec<f64> = grid.radii().iter().map(|&r| f(r)).collect();
        pair_from(grid, u.clone(), u)
    }

    #[test]
    fn manufactured_checklist_and_envelope_choice() {
        let spec = manufactured();
        let rep = validate_hypotheses(&spec);
        assert!(rep.all_passed(), "{rep}");
        let eta = 1e-3;
        let linear = ProblemSpec {
            nonlin: spec
                .nonlin
                .clone()
                .with_envelope(Envelope::new(ScalarMap::power(eta / 2.0, 1.0), Some(eta))),
            ..spec.clone()
        };
        let rep = validate_hypotheses(&linear);
        assert!(rep.line("envelope inequality").unwrap().passed);
        assert!(!rep.line("envelope KO integral finite").unwrap().passed);
        let quadratic = ProblemSpec {
            nonlin: spec
                .nonlin
                .clone()
                .with_envelope(Envelope::new(ScalarMap::power(eta * eta / 2.0, 2.0), Some(eta))),
            ..spec
        };
        assert!(validate_hypotheses(&quadratic).all_passed());
    }

    #[test]
    fn constant_weights_fail_the_potential_clause() {
        let spec = ProblemSpec::new(3, Weight::constant(1.0), Weight::constant(1.0), manufactured().nonlin).unwrap();
        let rep = validate_hypotheses(&spec);
        assert!(!rep.line("potential P(inf) finite").unwrap().passed);
        assert!(!rep.line("potential Q(inf) finite").unwrap().passed);
    }

    #[test]
    fn quartic_pair_with_unit_eta_envelope() {
        let nl = NonlinearPair::power(1.0, 2.0, 2.0, 1.0, 2.0, 2.0)
            .with_envelope(Envelope::new(ScalarMap::power(0.25, 2.0), Some(1.0)));
        let spec = ProblemSpec::new(3, Weight::exponential(1.0, 1.0), Weight::exponential(1.0, 1.0), nl).unwrap();
        let rep = validate_hypotheses(&spec);
        assert!(rep.line("envelope inequality").unwrap().passed, "{rep}");
        assert!(rep.all_passed(), "{rep}");
    }

    #[test]
    fn checklist_is_deterministic() {
        assert_eq!(
            validate_hypotheses(&manufactured()),
            validate_hypotheses(&manufactured())
        );
    }

    #[test]
    fn residual_of_exact_solution_is_second_order() {
        let spec = manufactured();
        let coarse = residual(&closed_form(0.02, 10.0, |r| 1.0 + r * r), &spec).unwrap();
        let fine = residual(&closed_form(0.01, 10.0, |r| 1.0 + r * r), &spec).unwrap();
        let ratio = coarse.max() / fine.max();
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn residual_vanishes_for_constants_and_flags_corruption() {
        let zero = ProblemSpec::new(3, Weight::zero(), Weight::zero(), manufactured().nonlin).unwrap();
        let sol = closed_form(0.05, 10.0, |_| 2.0);
        assert_eq!(residual(&sol, &zero).unwrap().max(), 0.0);
        let mut bad = closed_form(0.05, 10.0, |r| 1.0 + r * r);
        let k = 120;
        bad.u[k] *= 1.01;
        let rep = residual(&bad, &manufactured()).unwrap();
        assert_relative_eq!(rep.argmax_u, bad.grid.radii()[k], max_relative = 1e-12);
        assert!(rep.max_u > 100.0 * rep.max_v);
        let tiny = closed_form(0.5, 1.5, |_| 1.0);
        assert!(matches!(residual(&tiny, &zero), Err(Error::InsufficientDomain(_))));
    }

    #[test]
    fn converged_manufactured_solution_passes_residual_and_scalar_gap() {
        let spec = manufactured();
        let cfg = SolverConfig {
            r_max: 10.0,
            spacing: 0.01,
            ..SolverConfig::default()
        };
        let grid = RadialGrid::uniform(10.0, 0.01).unwrap();
        let sol = monotone_iterate(&spec, 1.0, 1.0, &grid, &cfg).unwrap();
        assert!(sol.residual.unwrap() < 1e-3);
        assert!(scalar_inequality_gap(&sol, &spec, 1.0).unwrap() <= 1e-3);
    }

    #[test]
    fn lower_bound_on_manufactured_solution() {
        let spec = manufactured();
        let sol = closed_form(0.01, 10.0, |r| 1.0 + r * r);
        let rep = check_lower_bound(&sol, &spec, 1.0).unwrap();
        assert!(rep.worst_margin() >= -1e-3);
        assert_eq!(rep.applicable_from, Some(1.0));
        // H⁻¹(y) = 1/(2y) for S(t) = 2t²: check one sample independently.
        let y = problem::potential_remainder(&Weight::sum(&spec.p, &spec.q), &[rep.radii[10]], 3).unwrap()[0];
        assert_relative_eq!(rep.rhs[10], 1.0 / (2.0 * y), max_relative = 1e-8);
    }

    #[test]
    fn lower_bound_vacuous_for_zero_weights() {
        let spec = ProblemSpec::new(3, Weight::zero(), Weight::zero(), manufactured().nonlin).unwrap();
        let sol = closed_form(0.1, 10.0, |_| 1.0);
        assert!(matches!(
            check_lower_bound(&sol, &spec, 1.0),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn divergence_of_manufactured_and_bounded_pairs() {
        let spec = manufactured();
        let sol = closed_form(0.01, 100.0, |r| 1.0 + r * r);
        let rep = check_divergence(&sol, &spec).unwrap();
        assert!(rep.u.diverges && rep.v.diverges && rep.consistent());
        assert!((rep.u.fit.unwrap().slope - 2.0).abs() < 0.05);
        assert!(rep.both_expected());

        let bounded = closed_form(0.01, 100.0, |r| 2.0 - 1.0 / (1.0 + r));
        let rep = check_divergence(&bounded, &spec).unwrap();
        assert!(!rep.at_least_one() && rep.interior_like());

        let short = closed_form(0.5, 10.0, |r| 1.0 + r);
        assert!(matches!(
            check_divergence(&short, &spec),
            Err(Error::InsufficientDomain(_))
        ));
    }

    #[test]
    fn w_divergence_forces_a_component() {
        let grid = RadialGrid::uniform(100.0, 0.01).unwrap();
        let u: Vec<f64> = grid.radii().iter().map(|_| 1.0).collect();
        let v: Vec<f64> = grid.radii().iter().map(|r| 1.0 + r).collect();
        let rep = check_divergence(&pair_from(grid, u, v), &manufactured()).unwrap();
        assert!(rep.w.diverges);
        assert!(!rep.u.diverges && rep.v.diverges);
    }

    #[test]
    fn sublinear_pair_has_infinite_diagonal_integrals() {
        let nl = NonlinearPair::power(1.0, 0.5, 0.5, 1.0, 0.5, 0.5);
        let w = Weight::custom("e^-r", Tail::ExponentialDecay { rate: 1.0 }, |r| (-r).exp());
        let spec = ProblemSpec::new(3, w.clone(), w, nl).unwrap();
        let sol = closed_form(0.01, 100.0, |r| 1.0 + r);
        let rep = check_divergence(&sol, &spec).unwrap();
        assert!(!rep.both_expected());
    }
}
