//! Green-type radial potentials
//!
//! ```text
//! P(r)      = ∫₀ʳ t^{1−n} ∫₀ᵗ s^{n−1} w(s) ds dt
//! Q_{R₀}(r) = ∫_{R₀}^r t^{1−n} ∫_{R₀}^t s^{n−1} w(s) ds dt
//! ```
//!
//! Limits at infinity are completed past a working cutoff `R` with the exact
//! remainder
//!
//! ```text
//! ∫_R^∞ t^{1−n} ∫_{R₀}^t s^{n−1} w ds dt = M(R)·R^{2−n}/(n−2) + (1/(n−2)) ∫_R^∞ s·w(s) ds
//! ```
//!
//! where `M(R)` is the inner integral at `R` and the last integral comes in
//! closed form from the weight's tail.

use alloc::vec::Vec;

use super::grid::graded_from;
use super::weight::{Tail, Weight};
use crate::error::{Error, Result};
use crate::math;
use crate::numerics::green::GreenOperator;
use crate::numerics::quad::{integrate, tail_integral, DecadeRule, IntegralVerdict};

/// Base spacing of the graded grids used for standalone potential evaluation.
const GRADED_H0: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialValue {
    pub value: f64,
    /// Richardson estimate from the grid with doubled spacing.
    pub error: f64,
}

fn check_dim(n: u32) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidInput(alloc::format!(
            "dimension must be at least 3, got {n}"
        )));
    }
    Ok(())
}

fn halve(nodes: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * nodes.len() - 1);
    for w in nodes.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*nodes.last().unwrap());
    out
}

/// Richardson combination of a second-order pair: extrapolated value and the
/// error estimate of the fine value.
fn richardson(coarse: f64, fine: f64) -> PotentialValue {
    let d = (fine - coarse) / 3.0;
    PotentialValue {
        value: fine + d,
        error: d.abs(),
    }
}

/// Outer and inner integrals at the last node, on `coarse` and its halving.
fn nested_pair(w: &Weight, coarse: &[f64], n: u32) -> ((f64, f64), (f64, f64)) {
    let run = |nodes: &[f64]| {
        let op = GreenOperator::new(nodes, n);
        let g: Vec<f64> = nodes.iter().map(|&r| w.eval(r)).collect();
        let outer = *op.apply(&g).last().unwrap();
        let inner = *op.inner(&g).last().unwrap();
        (outer, inner)
    };
    (run(coarse), run(&halve(coarse)))
}

/// `P(r)` for the weight `w` in dimension `n`.
pub fn potential(w: &Weight, r: f64, n: u32) -> Result<PotentialValue> {
    check_dim(n)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(alloc::format!(
            "radius must be finite and ≥ 0, got {r}"
        )));
    }
    if r == 0.0 || w.is_trivially_zero() {
        return Ok(PotentialValue { value: 0.0, error: 0.0 });
    }
    let coarse = graded_from(0.0, r, 2.0 * GRADED_H0)?;
    let ((c, _), (f, _)) = nested_pair(w, &coarse, n);
    Ok(richardson(c, f))
}

/// `P(rᵢ)` at every radius of an increasing sequence starting at 0.
pub fn potential_profile(w: &Weight, radii: &[f64], n: u32) -> Vec<f64> {
    let op = GreenOperator::new(radii, n);
    let g: Vec<f64> = radii.iter().map(|&r| w.eval(r)).collect();
    op.apply(&g)
}

/// Working cutoff past which the closed-form tail takes over.
fn tail_cutoff(w: &Weight, at_least: f64) -> f64 {
    let base = match w.tail() {
        Tail::CompactSupport { cutoff } => cutoff,
        Tail::ExponentialDecay { rate } => 40.0 / rate,
        Tail::PowerDecay { .. } => 1e3,
        Tail::NoDecay => 1e3,
    };
    base.max(at_least).max(1.0)
}

/// `∫_R^∞ t^{1−n} (M + ∫_R^t s^{n−1} w ds) dt` from the closed-form moment.
fn remainder(w: &Weight, big_r: f64, inner_at_r: f64, n: u32) -> Option<f64> {
    let nm2 = (n - 2) as f64;
    let moment = w.tail_moment(big_r)?;
    Some((inner_at_r * math::powi(big_r, n - 2).recip() + moment) / nm2)
}

fn divergent(w: &Weight, from: f64, n: u32) -> Result<IntegralVerdict> {
    let probe = 1e3_f64.max(from * 10.0);
    let partial = if from == 0.0 {
        potential(w, probe, n)?.value
    } else {
        q_truncated(w, from, probe, n)?.value
    };
    Ok(IntegralVerdict::Infinite {
        partial,
        probed_to: probe,
    })
}

/// Numerical decision for weights without a decay descriptor, on the
/// single-integral form `(1/(n−2))∫_{r₀}^∞ t·w(t) dt`.
fn undescribed_limit(w: &Weight, r0: f64, n: u32) -> Result<IntegralVerdict> {
    let start = r0.max(1.0);
    let head = if start > r0 {
        integrate(|t| t * w.eval(t), r0, start, 1e-15, 1e-12, 500).value
    } else {
        0.0
    };
    let nm2 = (n - 2) as f64;
    Ok(match tail_integral(|t| t * w.eval(t), start, &DecadeRule::default()) {
        IntegralVerdict::Finite { value, error } => IntegralVerdict::Finite {
            value: (head + value) / nm2,
            error: error / nm2,
        },
        IntegralVerdict::Infinite { partial, probed_to } => IntegralVerdict::Infinite {
            partial: (head + partial) / nm2,
            probed_to,
        },
    })
}

/// `P(∞)`: the double integral up to a working cutoff plus the closed-form
/// tail. Infinite when the tail descriptor rules out `∫ r·w(r) dr < ∞`.
pub fn potential_infinity(w: &Weight, n: u32) -> Result<IntegralVerdict> {
    check_dim(n)?;
    if w.is_trivially_zero() {
        return Ok(IntegralVerdict::Finite { value: 0.0, error: 0.0 });
    }
    match w.tail_guarantees_finite_moment() {
        Some(false) => divergent(w, 0.0, n),
        None => undescribed_limit(w, 0.0, n),
        Some(true) => {
            let big_r = tail_cutoff(w, 0.0);
            let coarse = graded_from(0.0, big_r, 2.0 * GRADED_H0)?;
            let ((pc, mc), (pf, mf)) = nested_pair(w, &coarse, n);
            let tail_f = remainder(w, big_r, mf, n)
                .ok_or_else(|| Error::Hypothesis(alloc::format!("tail of {} admits no closed form", w.label())))?;
            let tail_c = remainder(w, big_r, mc, n).unwrap_or(tail_f);
            let r = richardson(pc + tail_c, pf + tail_f);
            Ok(IntegralVerdict::Finite {
                value: r.value,
                error: r.error,
            })
        }
    }
}

/// `P(∞)` through the single integral `(1/(n−2))∫₀^∞ r·w(r) dr`, evaluated
/// by adaptive quadrature and the decade rule. Independent of the grid-based
/// route in [`potential_infinity`].
pub fn potential_infinity_fubini(w: &Weight, n: u32) -> Result<IntegralVerdict> {
    check_dim(n)?;
    undescribed_limit(w, 0.0, n)
}

/// `P(∞) − P(r)` at each of the given radii (increasing, nonnegative), with
/// the far tail beyond `10·max(radii)` completed in closed form.
pub fn potential_remainder(w: &Weight, radii: &[f64], n: u32) -> Result<Vec<f64>> {
    check_dim(n)?;
    if radii.is_empty() {
        return Ok(Vec::new());
    }
    if w.is_trivially_zero() {
        return Ok(alloc::vec![0.0; radii.len()]);
    }
    let r_last = *radii.last().unwrap();
    let big_r = (10.0 * r_last).max(1.0);
    if w.tail_moment(big_r).is_none() {
        return Err(Error::Inapplicable(alloc::format!(
            "potential of {} has no finite limit certified by its tail",
            w.label()
        )));
    }
    // Common grid: the requested radii merged into a graded grid to R.
    let mut nodes = graded_from(0.0, big_r, 2.0 * GRADED_H0)?;
    nodes.extend_from_slice(radii);
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    let coarse = remainder_on(w, &nodes, n);
    let fine = remainder_on(w, &halve(&nodes), n);
    let mut out = Vec::with_capacity(radii.len());
    let mut j = 0;
    for &r in radii {
        while (nodes[j] - r).abs() > 1e-12 * r.max(1.0) {
            j += 1;
        }
        out.push(richardson(coarse[j], fine[2 * j]).value);
    }
    Ok(out)
}

/// `P(∞) − P(rᵢ)` at every node, tail completed past the last node.
fn remainder_on(w: &Weight, nodes: &[f64], n: u32) -> Vec<f64> {
    let op = GreenOperator::new(nodes, n);
    let g: Vec<f64> = nodes.iter().map(|&r| w.eval(r)).collect();
    let inner = op.inner(&g);
    // ∫_r^R s·w(s) ds by trapezoid on s·w, accumulated from the far end.
    let last = nodes.len() - 1;
    let mut moment = alloc::vec![0.0; nodes.len()];
    moment[last] = w.tail_moment(nodes[last]).unwrap_or(0.0);
    for i in (0..last).rev() {
        let h = nodes[i + 1] - nodes[i];
        moment[i] = moment[i + 1] + 0.5 * h * (nodes[i] * g[i] + nodes[i + 1] * g[i + 1]);
    }
    let nm2 = (n - 2) as f64;
    nodes
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let m_part = if r > 0.0 { inner[i] / math::powi(r, n - 2) } else { 0.0 };
            (m_part + moment[i]) / nm2
        })
        .collect()
}

fn check_truncation(r0: f64, r: f64) -> Result<()> {
    if !(r0 > 0.0) {
        return Err(Error::InvalidInput(alloc::format!(
            "truncation radius must be > 0, got {r0}"
        )));
    }
    if !(r >= r0) {
        return Err(Error::InvalidInput(alloc::format!(
            "radius {r} is below the truncation radius {r0}"
        )));
    }
    Ok(())
}

/// `Q_{R₀}(r)`.
pub fn q_truncated(w: &Weight, r0: f64, r: f64, n: u32) -> Result<PotentialValue> {
    check_dim(n)?;
    check_truncation(r0, r)?;
    if r == r0 || w.is_trivially_zero() {
        return Ok(PotentialValue { value: 0.0, error: 0.0 });
    }
    let coarse = graded_from(r0, r, 2.0 * GRADED_H0)?;
    let ((c, _), (f, _)) = nested_pair(w, &coarse, n);
    Ok(richardson(c, f))
}

/// `Q_{R₀}` sampled on a graded grid from `r0` to `r1`, for root finding.
pub fn q_profile(w: &Weight, r0: f64, r1: f64, n: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dim(n)?;
    check_truncation(r0, r1)?;
    let nodes = graded_from(r0, r1, GRADED_H0)?;
    let values = potential_profile_from(w, &nodes, n);
    Ok((nodes, values))
}

fn potential_profile_from(w: &Weight, nodes: &[f64], n: u32) -> Vec<f64> {
    let op = GreenOperator::new(nodes, n);
    let g: Vec<f64> = nodes.iter().map(|&r| w.eval(r)).collect();
    op.apply(&g)
}

/// `Q_{R₀}(∞)`.
pub fn q_infinity(w: &Weight, r0: f64, n: u32) -> Result<IntegralVerdict> {
    check_dim(n)?;
    check_truncation(r0, r0)?;
    if w.is_trivially_zero() {
        return Ok(IntegralVerdict::Finite { value: 0.0, error: 0.0 });
    }
    match w.tail_guarantees_finite_moment() {
        Some(false) => divergent(w, r0, n),
        None => undescribed_limit(w, r0, n),
        Some(true) => {
            let big_r = tail_cutoff(w, 2.0 * r0);
            let coarse = graded_from(r0, big_r, 2.0 * GRADED_H0)?;
            let ((qc, mc), (qf, mf)) = nested_pair(w, &coarse, n);
            let tail_f = remainder(w, big_r, mf, n)
                .ok_or_else(|| Error::Hypothesis(alloc::format!("tail of {} admits no closed form", w.label())))?;
            let tail_c = remainder(w, big_r, mc, n).unwrap_or(tail_f);
            let r = richardson(qc + tail_c, qf + tail_f);
            Ok(IntegralVerdict::Finite {
                value: r.value,
                error: r.error,
            })
        }
    }
}
