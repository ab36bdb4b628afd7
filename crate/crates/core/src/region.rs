//! Maps of the admissible central values: raster classification over an
//! `(α, β)` box, edge location by bisection along rays, and the structural
//! checks (downward closure, bounded entire region).
//!
//! Undetermined classifications belong to neither side. Property checks skip
//! them and report them separately, so numerical indecision never shows up
//! as a violation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digest::sha256_hex;
use crate::error::{Error, Result};
use crate::math;
use crate::problem::ProblemSpec;
use crate::solver::{ClassifyOutcome, Solver, SolverConfig, UndeterminedReason};

/// Number of rays used for edge extraction unless configured otherwise.
pub const DEFAULT_RAYS: usize = 32;

/// Runs `f` over `0..count` and returns the results in index order.
/// Implementations may evaluate in any order or in parallel.
pub trait NodeMapper {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl NodeMapper for Sequential {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}

/// The rectangle `[a0, a1] × [b0, b1]` of central values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionBox {
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
}

impl RegionBox {
    pub fn new(a0: f64, a1: f64, b0: f64, b1: f64) -> Result<Self> {
        let finite = [a0, a1, b0, b1].iter().all(|x| x.is_finite());
        if !finite || !(a0 > 0.0 && b0 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "box corners must be positive and finite, got [{a0}, {a1}] x [{b0}, {b1}]"
            )));
        }
        if !(a1 > a0 && b1 > b0) {
            return Err(Error::InvalidInput(format!("empty box [{a0}, {a1}] x [{b0}, {b1}]")));
        }
        Ok(RegionBox { a0, a1, b0, b1 })
    }

    /// Same lower corner, twice the side lengths.
    pub fn doubled(&self) -> Self {
        RegionBox {
            a0: self.a0,
            a1: self.a0 + 2.0 * (self.a1 - self.a0),
            b0: self.b0,
            b1: self.b0 + 2.0 * (self.b1 - self.b0),
        }
    }

    pub fn min_edge(&self) -> f64 {
        (self.a1 - self.a0).min(self.b1 - self.b0)
    }

    /// `0.05 ×` the shorter side.
    pub fn default_delta(&self) -> f64 {
        0.05 * self.min_edge()
    }
}

/// Raster dimensions: `na` nodes along `α`, `nb` along `β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub na: usize,
    pub nb: usize,
}

impl Resolution {
    pub fn new(na: usize, nb: usize) -> Result<Self> {
        if na < 2 || nb < 2 {
            return Err(Error::InvalidInput(format!(
                "raster needs at least 2x2 nodes, got {na}x{nb}"
            )));
        }
        Ok(Resolution { na, nb })
    }

    /// Resolution of the doubled box with the same spacing.
    pub fn doubled(&self) -> Self {
        Resolution {
            na: 2 * self.na - 1,
            nb: 2 * self.nb - 1,
        }
    }
}

/// Outcome of one raster node; solver faults are kept per node.
pub type NodeResult = core::result::Result<ClassifyOutcome, Error>;

/// One located edge point with its bracket along the ray
/// `origin + t·direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePoint {
    pub origin: (f64, f64),
    pub direction: (f64, f64),
    /// Largest parameter classified entire.
    pub t_inner: f64,
    /// Smallest parameter classified as blowing up.
    pub t_outer: f64,
    pub inner: (f64, f64),
    pub outer: (f64, f64),
    /// Midpoint of the bracket.
    pub point: (f64, f64),
    /// Blow-up radius at the outer bracket end.
    pub outer_radius: f64,
    /// Parameter range of undetermined classifications left inside the
    /// bracket, if any.
    pub undetermined_band: Option<(f64, f64)>,
    pub classifications: usize,
}

impl EdgePoint {
    pub fn width(&self) -> f64 {
        self.t_outer - self.t_inner
    }

    fn at(&self, t: f64) -> (f64, f64) {
        (
            self.origin.0 + t * self.direction.0,
            self.origin.1 + t * self.direction.1,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeOptions {
    /// Bracket width along the ray (parameter units equal Euclidean length).
    pub tol: f64,
    pub initial_step: f64,
    /// Expansion stops after `initial_step · 2^max_doublings`.
    pub max_doublings: u32,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        EdgeOptions {
            tol: 1e-2,
            initial_step: 0.05,
            max_doublings: 15,
        }
    }
}

/// Unit direction at `angle` radians from the `α` axis.
pub fn ray_direction(angle: f64) -> (f64, f64) {
    (math::cos(angle), math::sin(angle))
}

/// `count` angles strictly inside `(0, π/2)`, evenly spaced at cell centres.
pub fn ray_angles(count: usize) -> Vec<f64> {
    let quarter = core::f64::consts::FRAC_PI_2;
    (0..count).map(|k| (k as f64 + 0.5) / count as f64 * quarter).collect()
}

/// Locates the edge along `origin + t·direction` with a solver built once.
pub fn edge_bisect_with(
    solver: &Solver,
    origin: (f64, f64),
    direction: (f64, f64),
    opts: &EdgeOptions,
) -> Result<EdgePoint> {
    let (dx, dy) = direction;
    let norm = math::sqrt(dx * dx + dy * dy);
    if !(dx > 0.0 && dy > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "ray direction must have positive components, got ({dx}, {dy})"
        )));
    }
    if !(opts.tol > 0.0 && opts.initial_step > 0.0) {
        return Err(Error::InvalidInput(
            "edge tolerance and initial step must be positive".into(),
        ));
    }
    let d = (dx / norm, dy / norm);
    let at = |t: f64| (origin.0 + t * d.0, origin.1 + t * d.1);
    let mut calls = 0usize;
    let mut classify = |t: f64| -> Result<ClassifyOutcome> {
        calls += 1;
        let (a, b) = at(t);
        solver.classify(a, b)
    };
    let start = classify(0.0)?;
    if !start.is_entire() {
        return Err(Error::Precondition(format!(
            "ray origin {origin:?} is not entire ({start})"
        )));
    }

    let mut t_in = 0.0;
    let mut undet: Vec<f64> = Vec::new();
    let mut t_out = None;
    let mut outer_radius = 0.0;
    let mut t = opts.initial_step;
    for _ in 0..=opts.max_doublings {
        match classify(t)? {
            ClassifyOutcome::Entire { .. } => {
                t_in = t;
                undet.clear();
            }
            ClassifyOutcome::FiniteBlowUp { radius, .. } => {
                t_out = Some(t);
                outer_radius = radius;
                break;
            }
            ClassifyOutcome::Undetermined { .. } => undet.push(t),
        }
        t *= 2.0;
    }
    let mut t_out = match t_out {
        Some(t) => t,
        None => return Err(Error::NoEdge { reached: t / 2.0 }),
    };

    loop {
        let probe = if undet.is_empty() {
            (t_out - t_in > opts.tol).then_some(0.5 * (t_in + t_out))
        } else {
            let lo = undet.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = undet.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // Shrink the larger gap until the whole bracket fits in tol, or
            // until both gaps are small when the band alone exceeds tol.
            let (left, right) = (lo - t_in, t_out - hi);
            let floor = if t_out - t_in > opts.tol {
                0.125 * opts.tol
            } else {
                opts.tol
            };
            if left.max(right) <= floor {
                None
            } else if left >= right {
                Some(0.5 * (t_in + lo))
            } else {
                Some(0.5 * (hi + t_out))
            }
        };
        let Some(mid) = probe else { break };
        match classify(mid)? {
            ClassifyOutcome::Entire { .. } => {
                t_in = mid;
                undet.retain(|&u| u > mid);
            }
            ClassifyOutcome::FiniteBlowUp { radius, .. } => {
                t_out = mid;
                outer_radius = radius;
                undet.retain(|&u| u < mid);
            }
            ClassifyOutcome::Undetermined { .. } => undet.push(mid),
        }
    }
    let band = if undet.is_empty() {
        None
    } else {
        Some((
            undet.iter().copied().fold(f64::INFINITY, f64::min),
            undet.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ))
    };
    let mut e = EdgePoint {
        origin,
        direction: d,
        t_inner: t_in,
        t_outer: t_out,
        inner: (0.0, 0.0),
        outer: (0.0, 0.0),
        point: (0.0, 0.0),
        outer_radius,
        undetermined_band: band,
        classifications: calls,
    };
    e.inner = e.at(t_in);
    e.outer = e.at(t_out);
    e.point = e.at(0.5 * (t_in + t_out));
    Ok(e)
}

pub fn edge_bisect(
    spec: &ProblemSpec,
    origin: (f64, f64),
    direction: (f64, f64),
    tol: f64,
    cfg: &SolverConfig,
) -> Result<EdgePoint> {
    let solver = Solver::new(spec, cfg)?;
    edge_bisect_with(
        &solver,
        origin,
        direction,
        &EdgeOptions {
            tol,
            ..EdgeOptions::default()
        },
    )
}

/// Cell-index bounding box of the entire nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub i_min: usize,
    pub i_max: usize,
    pub j_min: usize,
    pub j_max: usize,
    pub alpha_max: f64,
    pub beta_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub bounds: RegionBox,
    pub resolution: Resolution,
    pub delta: f64,
    /// Row-major by `α`: node `(i, j)` is at index `i·nb + j`.
    pub outcomes: Vec<NodeResult>,
    /// Located edge points with `min(α, β) > δ`, in ray order.
    pub edge_points: Vec<EdgePoint>,
    /// Every ray angle with its raw search result, including edge points at
    /// or below `δ` and searches that found no edge.
    pub rays: Vec<(f64, core::result::Result<EdgePoint, Error>)>,
    /// SHA-256 of the problem and solver descriptions.
    pub provenance: String,
}

impl RegionMap {
    pub fn alpha(&self, i: usize) -> f64 {
        raster_coord(self.bounds.a0, self.bounds.a1, self.resolution.na, i)
    }

    pub fn beta(&self, j: usize) -> f64 {
        raster_coord(self.bounds.b0, self.bounds.b1, self.resolution.nb, j)
    }

    pub fn outcome(&self, i: usize, j: usize) -> &NodeResult {
        &self.outcomes[i * self.resolution.nb + j]
    }

    /// Replaces one outcome (used to plant faults in fixtures).
    pub fn set_outcome(&mut self, i: usize, j: usize, outcome: NodeResult) {
        let nb = self.resolution.nb;
        self.outcomes[i * nb + j] = outcome;
    }

    pub fn is_entire(&self, i: usize, j: usize) -> bool {
        matches!(self.outcome(i, j), Ok(o) if o.is_entire())
    }

    /// Entire with `min(α, β) ≥ δ`.
    pub fn in_g_delta(&self, i: usize, j: usize) -> bool {
        self.is_entire(i, j) && self.alpha(i).min(self.beta(j)) >= self.delta
    }

    /// Neither entire nor blow-up: undetermined or a solver fault.
    pub fn is_indeterminate(&self, i: usize, j: usize) -> bool {
        !matches!(self.outcome(i, j), Ok(o) if !o.is_undetermined())
    }

    pub fn count(&self, tag: &str) -> usize {
        self.outcomes
            .iter()
            .filter(|o| match o {
                Ok(o) => o.tag() == tag,
                Err(_) => tag == "fault",
            })
            .count()
    }

    pub fn undetermined_reasons(&self) -> Vec<UndeterminedReason> {
        self.outcomes
            .iter()
            .filter_map(|o| match o {
                Ok(ClassifyOutcome::Undetermined { reason }) => Some(*reason),
                _ => None,
            })
            .collect()
    }

    pub fn entire_bounding_box(&self) -> Option<BoundingBox> {
        self.bounding_box_of(|i, j| self.is_entire(i, j))
    }

    /// Bounding box of the nodes in `G_δ`.
    pub fn g_delta_bounding_box(&self) -> Option<BoundingBox> {
        self.bounding_box_of(|i, j| self.in_g_delta(i, j))
    }

    fn bounding_box_of(&self, member: impl Fn(usize, usize) -> bool) -> Option<BoundingBox> {
        let mut bb: Option<BoundingBox> = None;
        for i in 0..self.resolution.na {
            for j in 0..self.resolution.nb {
                if !member(i, j) {
                    continue;
                }
                let b = bb.get_or_insert(BoundingBox {
                    i_min: i,
                    i_max: i,
                    j_min: j,
                    j_max: j,
                    alpha_max: 0.0,
                    beta_max: 0.0,
                });
                b.i_min = b.i_min.min(i);
                b.i_max = b.i_max.max(i);
                b.j_min = b.j_min.min(j);
                b.j_max = b.j_max.max(j);
            }
        }
        bb.map(|mut b| {
            b.alpha_max = self.alpha(b.i_max);
            b.beta_max = self.beta(b.j_max);
            b
        })
    }

    /// The `G_δ` nodes stay off the far edges of the raster, so the sweep box
    /// contains all of `G_δ` it saw.
    pub fn bounded_inside(&self) -> bool {
        self.g_delta_bounding_box()
            .is_some_and(|b| b.i_max + 1 < self.resolution.na && b.j_max + 1 < self.resolution.nb)
    }

    /// Whether the raster is symmetric under `(i, j) ↦ (j, i)` (square maps
    /// only), comparing outcome tags.
    pub fn is_diagonally_symmetric(&self) -> bool {
        let Resolution { na, nb } = self.resolution;
        if na != nb {
            return false;
        }
        let tag = |o: &NodeResult| o.as_ref().map(|o| o.tag()).unwrap_or("fault");
        (0..na).all(|i| (0..i).all(|j| tag(self.outcome(i, j)) == tag(self.outcome(j, i))))
    }
}

fn raster_coord(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / (n - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExploreOptions {
    pub rays: usize,
    pub edge: EdgeOptions,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            rays: DEFAULT_RAYS,
            edge: EdgeOptions::default(),
        }
    }
}

/// SHA-256 of the canonical problem and configuration descriptions.
pub fn provenance_digest(spec: &ProblemSpec, cfg: &SolverConfig) -> String {
    sha256_hex(format!("{}\n{}", spec.describe(), cfg.describe()).as_bytes())
}

/// Classifies every raster node and locates the edge along rays from the
/// lower box corner `(a0, b0)`. Node faults are recorded without aborting.
pub fn explore<M: NodeMapper>(
    spec: &ProblemSpec,
    bounds: RegionBox,
    resolution: Resolution,
    delta: f64,
    cfg: &SolverConfig,
    opts: &ExploreOptions,
    mapper: &M,
) -> Result<RegionMap> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidInput(format!("delta must be positive, got {delta}")));
    }
    let solver = Solver::new(spec, cfg)?;
    let nb = resolution.nb;
    let coord = |k: usize| {
        let (i, j) = (k / nb, k % nb);
        (
            raster_coord(bounds.a0, bounds.a1, resolution.na, i),
            raster_coord(bounds.b0, bounds.b1, resolution.nb, j),
        )
    };
    let outcomes = mapper.map(resolution.na * nb, |k| {
        let (a, b) = coord(k);
        solver.classify(a, b)
    });

    let angles = ray_angles(opts.rays);
    let rays = mapper.map(angles.len(), |k| {
        edge_bisect_with(&solver, (bounds.a0, bounds.b0), ray_direction(angles[k]), &opts.edge)
    });
    let rays: Vec<_> = angles.into_iter().zip(rays).collect();
    let edge_points = rays
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok())
        .filter(|e| e.point.0.min(e.point.1) > delta)
        .cloned()
        .collect();
    Ok(RegionMap {
        bounds,
        resolution,
        delta,
        outcomes,
        edge_points,
        rays,
        provenance: provenance_digest(spec, cfg),
    })
}

/// A dominating entire node whose dominated partner is not entire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosureViolation {
    pub dominating: (usize, usize),
    pub dominated: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    /// Distinct violating pairs, sorted.
    pub violations: Vec<ClosureViolation>,
    pub pairs_checked: usize,
    /// Pairs skipped because a node was undetermined or faulted.
    pub pairs_skipped: usize,
}

impl ClosureReport {
    /// Distinct dominated nodes appearing in violations.
    pub fn violating_cells(&self) -> Vec<(usize, usize)> {
        let mut cells: Vec<_> = self.violations.iter().map(|v| v.dominated).collect();
        cells.sort_unstable();
        cells.dedup();
        cells
    }
}

/// Draws `samples` dominance pairs: a uniform node, then a uniform node in
/// the rectangle it dominates. Pairs touching an undetermined or faulted node
/// are skipped and counted.
pub fn check_downward_closure(map: &RegionMap, samples: usize, seed: u64) -> ClosureReport {
    let Resolution { na, nb } = map.resolution;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut skipped = 0;
    for _ in 0..samples {
        let (i, j) = (rng.random_range(0..na), rng.random_range(0..nb));
        let (k, l) = (rng.random_range(0..=i), rng.random_range(0..=j));
        if map.is_indeterminate(i, j) || map.is_indeterminate(k, l) {
            skipped += 1;
            continue;
        }
        if map.is_entire(i, j) && !map.is_entire(k, l) {
            violations.push(ClosureViolation {
                dominating: (i, j),
                dominated: (k, l),
            });
        }
    }
    violations.sort_unstable();
    violations.dedup();
    ClosureReport {
        violations,
        pairs_checked: samples - skipped,
        pairs_skipped: skipped,
    }
}

/// Change of the `G_δ` bounding box between a map and its doubled-box
/// counterpart, in raster cells (same spacing in both maps).
pub fn bounding_box_shift(small: &RegionMap, large: &RegionMap) -> Option<(f64, f64)> {
    let (a, b) = (small.g_delta_bounding_box()?, large.g_delta_bounding_box()?);
    let ha = (small.bounds.a1 - small.bounds.a0) / (small.resolution.na - 1) as f64;
    let hb = (small.bounds.b1 - small.bounds.b0) / (small.resolution.nb - 1) as f64;
    Some((
        (a.alpha_max - b.alpha_max).abs() / ha,
        (a.beta_max - b.beta_max).abs() / hb,
    ))
}

/// Short description used in reports.
pub fn describe_outcome(o: &NodeResult) -> String {
    match o {
        Ok(o) => o.to_string(),
        Err(e) => format!("fault: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{NonlinearPair, Weight};

    fn cfg(r_max: f64, h: f64) -> SolverConfig {
        SolverConfig {
            r_max,
            spacing: h,
            ..SolverConfig::default()
        }
    }

    fn power_spec() -> ProblemSpec {
        ProblemSpec::new(
            3,
            Weight::exponential(1.0, 1.0),
            Weight::exponential(1.0, 1.0),
            NonlinearPair::power(1.0, 2.0, 2.0, 1.0, 2.0, 2.0),
        )
        .unwrap()
    }

    fn zero_spec() -> ProblemSpec {
        ProblemSpec::new(
            3,
            Weight::zero(),
            Weight::zero(),
            NonlinearPair::power(1.0, 2.0, 2.0, 1.0, 2.0, 2.0),
        )
        .unwrap()
    }

    #[test]
    fn box_and_resolution_validation() {
        assert!(RegionBox::new(1.0, 1.0, 0.1, 2.0).is_err());
        assert!(RegionBox::new(0.0, 1.0, 0.1, 2.0).is_err());
        let b = RegionBox::new(0.1, 20.0, 0.1, 20.0).unwrap();
        assert_eq!(b.doubled().a1, 39.9);
        assert!((b.default_delta() - 0.995).abs() < 1e-12);
        assert_eq!(Resolution::new(64, 64).unwrap().doubled().na, 127);
        assert!(Resolution::new(1, 4).is_err());
    }

    #[test]
    fn doubled_raster_contains_original_nodes() {
        let b = RegionBox::new(0.1, 2.0, 0.3, 1.0).unwrap();
        let r = Resolution::new(5, 7).unwrap();
        let dummy = |bounds, resolution| RegionMap {
            bounds,
            resolution,
            delta: 0.1,
            outcomes: Vec::new(),
            edge_points: Vec::new(),
            rays: Vec::new(),
            provenance: String::new(),
        };
        let (s, l) = (dummy(b, r), dummy(b.doubled(), r.doubled()));
        for i in 0..5 {
            assert!((s.alpha(i) - l.alpha(i)).abs() < 1e-12);
        }
        for j in 0..7 {
            assert!((s.beta(j) - l.beta(j)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weights_map_is_all_entire_and_closed() {
        let b = RegionBox::new(0.1, 5.0, 0.1, 5.0).unwrap();
        let opts = ExploreOptions {
            rays: 2,
            edge: EdgeOptions {
                max_doublings: 3,
                ..EdgeOptions::default()
            },
        };
        let mut map = explore(
            &zero_spec(),
            b,
            Resolution::new(8, 8).unwrap(),
            0.05,
            &cfg(2.0, 0.1),
            &opts,
            &Sequential,
        )
        .unwrap();
        assert_eq!(map.count("entire"), 64);
        assert!(map.edge_points.is_empty());
        assert!(map.rays.iter().all(|(_, r)| matches!(r, Err(Error::NoEdge { .. }))));
        assert!(check_downward_closure(&map, 2000, 7).violations.is_empty());
        assert!(!map.bounded_inside());

        map.set_outcome(
            2,
            3,
            Ok(ClassifyOutcome::FiniteBlowUp {
                radius: 1.0,
                component: crate::solver::Component::U,
                cell: 0.0,
            }),
        );
        let rep = check_downward_closure(&map, 10_000, 7);
        assert_eq!(rep.violating_cells(), alloc::vec![(2, 3)]);
        assert!(rep
            .violations
            .iter()
            .all(|v| v.dominating.0 >= 2 && v.dominating.1 >= 3));
    }

    #[test]
    fn undetermined_cells_are_skipped() {
        let b = RegionBox::new(0.1, 5.0, 0.1, 5.0).unwrap();
        let opts = ExploreOptions {
            rays: 0,
            ..ExploreOptions::default()
        };
        let mut map = explore(
            &zero_spec(),
            b,
            Resolution::new(4, 4).unwrap(),
            0.05,
            &cfg(2.0, 0.1),
            &opts,
            &Sequential,
        )
        .unwrap();
        map.set_outcome(
            0,
            0,
            Ok(ClassifyOutcome::Undetermined {
                reason: UndeterminedReason::IterationCap,
            }),
        );
        let rep = check_downward_closure(&map, 5000, 1);
        assert!(rep.violations.is_empty());
        assert!(rep.pairs_skipped > 0);
    }

    #[test]
    fn power_problem_edge_on_the_diagonal() {
        let c = cfg(30.0, 0.02);
        let e = edge_bisect(&power_spec(), (0.1, 0.1), (1.0, 1.0), 1e-3, &c).unwrap();
        match e.undetermined_band {
            Some((lo, hi)) => assert!(lo - e.t_inner <= 1e-3 && e.t_outer - hi <= 1e-3, "{e:?}"),
            None => assert!(e.width() <= 1e-3, "{e:?}"),
        }
        assert!(e.width() <= 1e-2, "{e:?}");
        let s = Solver::new(&power_spec(), &c).unwrap();
        assert!(s.classify(e.inner.0, e.inner.1).unwrap().is_entire());
        assert!(s.classify(e.outer.0, e.outer.1).unwrap().is_blowup());
        assert!((e.point.0 - 0.99).abs() < 0.02, "{e:?}");
        // Points between the origin and the inner end stay entire.
        for k in 1..5 {
            let t = e.t_inner * k as f64 / 5.0;
            let (a, b) = (0.1 + t * e.direction.0, 0.1 + t * e.direction.1);
            assert!(s.classify(a, b).unwrap().is_entire());
        }
    }

    #[test]
    fn sublinear_pair_has_no_edge() {
        let spec = ProblemSpec::new(
            3,
            Weight::exponential(1.0, 1.0),
            Weight::exponential(1.0, 1.0),
            NonlinearPair::power(1.0, 0.5, 0.5, 1.0, 0.5, 0.5),
        )
        .unwrap();
        let err = edge_bisect(&spec, (0.1, 0.1), (1.0, 1.0), 1e-2, &cfg(20.0, 0.05)).unwrap_err();
        match err {
            Error::NoEdge { reached } => assert!(reached >= 0.05 * 32768.0 * 0.99),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_rays_and_origins_rejected() {
        let c = cfg(10.0, 0.05);
        assert!(edge_bisect(&power_spec(), (0.1, 0.1), (1.0, 0.0), 1e-2, &c).is_err());
        assert!(matches!(
            edge_bisect(&power_spec(), (5.0, 5.0), (1.0, 1.0), 1e-2, &c),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn ray_angles_are_interior() {
        let a = ray_angles(32);
        assert_eq!(a.len(), 32);
        assert!(a.iter().all(|&x| x > 0.0 && x < core::f64::consts::FRAC_PI_2));
        let (c, s) = ray_direction(a[5]);
        assert!((c * c + s * s - 1.0).abs() < 1e-14);
    }
}
