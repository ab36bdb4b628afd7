//! Monotone iteration, scalar supersolution, classification of central
//! values, blow-up radii and the Keller–Osserman barrier.
//!
//! The Picard sweep evaluates
//!
//! ```text
//! u_k = α + G[p·f(u_{k−1}, v_{k−1})],   v_k = β + G[q·g(u_{k−1}, v_{k−1})]
//! ```
//!
//! with the discrete Green operator of [`crate::numerics::green`]. All of its
//! weights are nonnegative and `f`, `g` are evaluated through monotone
//! arithmetic, so `u_{k+1} ≥ u_k` and `v_{k+1} ≥ v_k` hold node by node in
//! floating point. The sweep counts any violation anyway; the count is part of
//! every [`SolutionPair`] and of the process-wide [`stats`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::ko;
use crate::numerics::fit::loglog_last_decade;
use crate::numerics::green::GreenOperator;
use crate::numerics::ode::{self, OdeOptions, OdeStop, Trajectory};
use crate::numerics::quad::IntegralVerdict;
use crate::problem::{self, ProblemSpec, RadialGrid, Weight};

/// Process-wide Picard counters, summed over every solve since start-up.
pub mod stats {
    use core::sync::atomic::{AtomicU64, Ordering};

    static SOLVES: AtomicU64 = AtomicU64::new(0);
    static SWEEPS: AtomicU64 = AtomicU64::new(0);
    static VIOLATIONS: AtomicU64 = AtomicU64::new(0);

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub struct PicardTotals {
        pub solves: u64,
        pub sweeps: u64,
        /// Node comparisons with `x_{k+1} < x_k`, over both components.
        pub monotonicity_violations: u64,
    }

    pub fn totals() -> PicardTotals {
        PicardTotals {
            solves: SOLVES.load(Ordering::Relaxed),
            sweeps: SWEEPS.load(Ordering::Relaxed),
            monotonicity_violations: VIOLATIONS.load(Ordering::Relaxed),
        }
    }

    pub(crate) fn record(sweeps: u64, violations: u64) {
        SOLVES.fetch_add(1, Ordering::Relaxed);
        SWEEPS.fetch_add(sweeps, Ordering::Relaxed);
        VIOLATIONS.fetch_add(violations, Ordering::Relaxed);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative pointwise increment at which the Picard iteration stops.
    pub tol_fixed_point: f64,
    pub k_max: usize,
    /// Values at or above this count as blow-up.
    pub blowup_threshold: f64,
    /// Converged solutions with sup in `[band_low, blowup_threshold)` are
    /// re-solved once on a doubled domain, then declared undetermined.
    pub band_low: f64,
    pub r_max: f64,
    /// Uniform grid spacing of the Picard grid.
    pub spacing: f64,
    pub refine_factor: u32,
    pub refine_rounds: u32,
    /// Nonlinearity values are capped here; a capped evaluation sets a sticky
    /// flag.
    pub clamp: f64,
    pub extend_in_band: bool,
    /// Relative slack of the supersolution comparison.
    pub comparison_slack: f64,
    pub ode_rtol: f64,
    pub ode_atol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_fixed_point: 1e-10,
            k_max: 2000,
            blowup_threshold: 1e8,
            band_low: 1e6,
            r_max: 60.0,
            spacing: 0.01,
            refine_factor: 10,
            refine_rounds: 2,
            clamp: 1e12,
            extend_in_band: true,
            comparison_slack: 1e-6,
            ode_rtol: 1e-8,
            ode_atol: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol_fixed_point", self.tol_fixed_point),
            ("blowup_threshold", self.blowup_threshold),
            ("band_low", self.band_low),
            ("r_max", self.r_max),
            ("spacing", self.spacing),
            ("clamp", self.clamp),
            ("ode_rtol", self.ode_rtol),
            ("ode_atol", self.ode_atol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.tol_fixed_point >= 1.0 {
            return Err(Error::InvalidInput("tol_fixed_point must be below 1".into()));
        }
        if self.k_max == 0 || self.refine_factor == 0 {
            return Err(Error::InvalidInput("k_max and refine_factor must be positive".into()));
        }
        if self.band_low >= self.blowup_threshold {
            return Err(Error::InvalidInput("band_low must be below blowup_threshold".into()));
        }
        if self.spacing >= self.r_max {
            return Err(Error::InvalidInput("spacing must be below r_max".into()));
        }
        Ok(())
    }

    fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            rtol: self.ode_rtol,
            atol: self.ode_atol,
            threshold: self.blowup_threshold,
            refine_factor: self.refine_factor,
            refine_rounds: self.refine_rounds,
            ..OdeOptions::default()
        }
    }

    /// Canonical description for digests.
    pub fn describe(&self) -> String {
        format!(
            "tol={};k_max={};threshold={};band_low={};r_max={};spacing={};refine={}x{};clamp={};extend={};slack={};rtol={};atol={}",
            self.tol_fixed_point,
            self.k_max,
            self.blowup_threshold,
            self.band_low,
            self.r_max,
            self.spacing,
            self.refine_factor,
            self.refine_rounds,
            self.clamp,
            self.extend_in_band,
            self.comparison_slack,
            self.ode_rtol,
            self.ode_atol
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    U,
    V,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::U => "u",
            Component::V => "v",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UndeterminedReason {
    IterationCap,
    /// The iterates crossed the threshold but the shooting solve did not
    /// confirm a crossing inside the grid.
    GridCap,
    ThresholdBand,
    /// The converged pair is not dominated by the scalar supersolution.
    ComparisonFailed,
    /// Nonlinearity values were capped without the threshold being reached.
    Overflow,
}

impl fmt::Display for UndeterminedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UndeterminedReason::IterationCap => "iteration-cap",
            UndeterminedReason::GridCap => "grid-cap",
            UndeterminedReason::ThresholdBand => "threshold-band",
            UndeterminedReason::ComparisonFailed => "comparison-failed",
            UndeterminedReason::Overflow => "overflow",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifyOutcome {
    /// Converged on `[0, r_max]` below the band and dominated by the scalar
    /// supersolution. `growth_exponent` is the log–log slope of `u + v` over
    /// the last decade of radii.
    Entire {
        sup: f64,
        growth_exponent: Option<f64>,
    },
    /// The first threshold crossing. `cell` is the width of the final
    /// refinement cell, i.e. the resolution of `radius`.
    FiniteBlowUp {
        radius: f64,
        component: Component,
        cell: f64,
    },
    Undetermined {
        reason: UndeterminedReason,
    },
}

impl ClassifyOutcome {
    pub fn is_entire(&self) -> bool {
        matches!(self, ClassifyOutcome::Entire { .. })
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self, ClassifyOutcome::FiniteBlowUp { .. })
    }

    pub fn is_undetermined(&self) -> bool {
        matches!(self, ClassifyOutcome::Undetermined { .. })
    }

    pub fn blowup_radius(&self) -> Option<f64> {
        match self {
            ClassifyOutcome::FiniteBlowUp { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    /// Short tag: `entire`, `blowup` or `undetermined`.
    pub fn tag(&self) -> &'static str {
        match self {
            ClassifyOutcome::Entire { .. } => "entire",
            ClassifyOutcome::FiniteBlowUp { .. } => "blowup",
            ClassifyOutcome::Undetermined { .. } => "undetermined",
        }
    }
}

impl fmt::Display for ClassifyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifyOutcome::Entire { sup, growth_exponent } => {
                write!(f, "entire(sup={sup}")?;
                if let Some(g) = growth_exponent {
                    write!(f, ", growth={g}")?;
                }
                f.write_str(")")
            }
            ClassifyOutcome::FiniteBlowUp {
                radius,
                component,
                cell,
            } => {
                write!(f, "blowup(R={radius}, component={component}, cell={cell})")
            }
            ClassifyOutcome::Undetermined { reason } => write!(f, "undetermined({reason})"),
        }
    }
}

/// A sampled pair `(u, v)` with its classification.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPair {
    pub grid: RadialGrid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub status: ClassifyOutcome,
    pub iterations_used: usize,
    /// Largest absolute residual of the radial equations on the far part of
    /// the grid; `None` unless the iteration converged.
    pub residual: Option<f64>,
    pub monotonicity_violations: u64,
    /// A nonlinearity value was capped during the iteration.
    pub clamped: bool,
}

impl SolutionPair {
    pub fn w(&self) -> Vec<f64> {
        self.u.iter().zip(&self.v).map(|(a, b)| a + b).collect()
    }
}

/// A scalar radial solution sampled on a grid, up to its blow-up.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSolution {
    pub radii: Vec<f64>,
    /// Values at the grid nodes reached before the blow-up radius.
    pub values: Vec<f64>,
    pub blowup: Option<BlowUp>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowUp {
    pub radius: f64,
    pub cell: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub outcome: ClassifyOutcome,
    pub solution: SolutionPair,
    /// Present when the comparison with the scalar supersolution was run.
    pub supersolution: Option<ScalarSolution>,
}

enum PicardStatus {
    Converged,
    Crossed,
    IterationCap,
}

struct PicardRun {
    u: Vec<f64>,
    v: Vec<f64>,
    status: PicardStatus,
    iterations: usize,
    violations: u64,
    clamped: bool,
}

/// Solver bound to one problem and one grid; the Green operator is built once.
#[derive(Debug, Clone)]
pub struct Solver {
    spec: ProblemSpec,
    cfg: SolverConfig,
    grid: RadialGrid,
    op: GreenOperator,
    p_vals: Vec<f64>,
    q_vals: Vec<f64>,
}

impl Solver {
    /// Uniform grid on `[0, cfg.r_max]` with spacing `cfg.spacing`.
    pub fn new(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = RadialGrid::uniform(cfg.r_max, cfg.spacing)?;
        Self::with_grid(spec, cfg, grid)
    }

    pub fn with_grid(spec: &ProblemSpec, cfg: &SolverConfig, grid: RadialGrid) -> Result<Self> {
        cfg.validate()?;
        spec.check_structure(grid.radii())?;
        let op = GreenOperator::new(grid.radii(), spec.n);
        let p_vals = grid.radii().iter().map(|&r| spec.p.eval(r)).collect();
        let q_vals = grid.radii().iter().map(|&r| spec.q.eval(r)).collect();
        Ok(Solver {
            spec: spec.clone(),
            cfg: *cfg,
            grid,
            op,
            p_vals,
            q_vals,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    fn check_central(alpha: f64, beta: f64) -> Result<()> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "central values must be positive and finite, got ({alpha}, {beta})"
            )));
        }
        Ok(())
    }

    fn picard(&self, alpha: f64, beta: f64) -> Result<PicardRun> {
        let m = self.grid.len();
        let nl = &self.spec.nonlin;
        let clamp = self.cfg.clamp;
        let thr = self.cfg.blowup_threshold;
        let mut u = alloc::vec![alpha; m];
        let mut v = alloc::vec![beta; m];
        let mut gu = alloc::vec![0.0; m];
        let mut gv = alloc::vec![0.0; m];
        let mut un = alloc::vec![0.0; m];
        let mut vn = alloc::vec![0.0; m];
        let mut violations = 0u64;
        let mut clamped = false;
        let mut status = PicardStatus::IterationCap;
        let mut iterations = 0;
        for k in 1..=self.cfg.k_max {
            iterations = k;
            for i in 0..m {
                let (fv, gvv) = (nl.f(u[i], v[i]), nl.g(u[i], v[i]));
                if fv > clamp || gvv > clamp {
                    clamped = true;
                }
                gu[i] = self.p_vals[i] * fv.min(clamp);
                gv[i] = self.q_vals[i] * gvv.min(clamp);
            }
            self.op.apply_into(&gu, &mut un);
            self.op.apply_into(&gv, &mut vn);
            let mut increment = 0.0f64;
            let mut crossed = false;
            for i in 0..m {
                un[i] += alpha;
                vn[i] += beta;
                if !(un[i].is_finite() && vn[i].is_finite()) {
                    return Err(Error::NonFinite {
                        radius: self.grid.radii()[i],
                    });
                }
                violations += (un[i] < u[i]) as u64 + (vn[i] < v[i]) as u64;
                increment = increment.max((un[i] - u[i]) / un[i]).max((vn[i] - v[i]) / vn[i]);
                crossed |= un[i] >= thr || vn[i] >= thr;
            }
            core::mem::swap(&mut u, &mut un);
            core::mem::swap(&mut v, &mut vn);
            if crossed {
                status = PicardStatus::Crossed;
                break;
            }
            if increment <= self.cfg.tol_fixed_point {
                status = PicardStatus::Converged;
                break;
            }
        }
        stats::record(iterations as u64, violations);
        Ok(PicardRun {
            u,
            v,
            status,
            iterations,
            violations,
            clamped,
        })
    }

    fn pair_from(&self, alpha: f64, beta: f64, run: PicardRun, status: ClassifyOutcome) -> SolutionPair {
        let residual = match run.status {
            PicardStatus::Converged => {
                crate::verify::max_residual(self.grid.radii(), &run.u, &run.v, &self.spec, 0.1 * self.grid.r_max())
            }
            _ => None,
        };
        SolutionPair {
            grid: self.grid.clone(),
            u: run.u,
            v: run.v,
            alpha,
            beta,
            status,
            iterations_used: run.iterations,
            residual,
            monotonicity_violations: run.violations,
            clamped: run.clamped,
        }
    }

    fn growth_exponent(&self, u: &[f64], v: &[f64]) -> Option<f64> {
        let w: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
        loglog_last_decade(self.grid.radii(), &w, 200).map(|f| f.slope)
    }

    /// Monotone iteration only. The status reflects the iteration alone:
    /// `Entire` when it converges below the band (no supersolution check),
    /// `FiniteBlowUp` at the first grid node where an iterate reaches the
    /// threshold.
    pub fn monotone_iterate(&self, alpha: f64, beta: f64) -> Result<SolutionPair> {
        Self::check_central(alpha, beta)?;
        let run = self.picard(alpha, beta)?;
        let status = match run.status {
            PicardStatus::Converged => {
                let sup = sup2(&run.u, &run.v);
                if sup >= self.cfg.band_low {
                    ClassifyOutcome::Undetermined {
                        reason: UndeterminedReason::ThresholdBand,
                    }
                } else if run.clamped {
                    ClassifyOutcome::Undetermined {
                        reason: UndeterminedReason::Overflow,
                    }
                } else {
                    ClassifyOutcome::Entire {
                        sup,
                        growth_exponent: self.growth_exponent(&run.u, &run.v),
                    }
                }
            }
            PicardStatus::Crossed => {
                let thr = self.cfg.blowup_threshold;
                let i = run
                    .u
                    .iter()
                    .zip(&run.v)
                    .position(|(a, b)| *a >= thr || *b >= thr)
                    .unwrap();
                let component = if run.u[i] >= thr { Component::U } else { Component::V };
                let r = self.grid.radii();
                ClassifyOutcome::FiniteBlowUp {
                    radius: r[i],
                    component,
                    cell: if i > 0 { r[i] - r[i - 1] } else { 0.0 },
                }
            }
            PicardStatus::IterationCap => ClassifyOutcome::Undetermined {
                reason: UndeterminedReason::IterationCap,
            },
        };
        Ok(self.pair_from(alpha, beta, run, status))
    }

    /// The scalar supersolution `W'' + ((n−1)/r)W' = (p+q)·S(W)`, `W(0) = w0`,
    /// sampled on this solver's grid.
    pub fn supersolution(&self, w0: f64) -> Result<ScalarSolution> {
        supersolution_on(&self.spec, w0, self.grid.radii(), &self.cfg)
    }

    /// Integrates the full system `(u, u', v, v')` from the centre up to
    /// `r_end`, stopping at the threshold.
    pub fn shoot(&self, alpha: f64, beta: f64, r_end: f64) -> Trajectory<4> {
        let spec = &self.spec;
        let n1 = (spec.n - 1) as f64;
        let nf = spec.n as f64;
        let rhs = |r: f64, y: &[f64; 4]| {
            let (u, v) = (y[0].max(0.0), y[2].max(0.0));
            let fu = spec.p.eval(r) * spec.nonlin.f(u, v);
            let gv = spec.q.eval(r) * spec.nonlin.g(u, v);
            if r == 0.0 {
                [y[1], fu / nf, y[3], gv / nf]
            } else {
                [y[1], fu - n1 / r * y[1], y[3], gv - n1 / r * y[3]]
            }
        };
        ode::integrate(
            &rhs,
            0.0,
            [alpha, 0.0, beta, 0.0],
            r_end,
            &[0, 2],
            &self.cfg.ode_options(),
        )
    }

    fn shoot_outcome(&self, alpha: f64, beta: f64, otherwise: UndeterminedReason) -> ClassifyOutcome {
        let traj = self.shoot(alpha, beta, self.grid.r_max());
        match traj.stop {
            OdeStop::Crossed {
                radius,
                cell,
                component,
            } => ClassifyOutcome::FiniteBlowUp {
                radius,
                cell,
                component: if component == 0 { Component::U } else { Component::V },
            },
            OdeStop::StepUnderflow { radius } => ClassifyOutcome::FiniteBlowUp {
                radius,
                cell: 0.0,
                component: last_large(&traj),
            },
            _ => ClassifyOutcome::Undetermined { reason: otherwise },
        }
    }

    pub fn classify(&self, alpha: f64, beta: f64) -> Result<ClassifyOutcome> {
        Ok(self.classify_detailed(alpha, beta)?.outcome)
    }

    pub fn classify_detailed(&self, alpha: f64, beta: f64) -> Result<Classification> {
        Self::check_central(alpha, beta)?;
        let run = self.picard(alpha, beta)?;
        match run.status {
            PicardStatus::IterationCap => {
                let outcome = ClassifyOutcome::Undetermined {
                    reason: UndeterminedReason::IterationCap,
                };
                Ok(Classification {
                    outcome,
                    solution: self.pair_from(alpha, beta, run, outcome),
                    supersolution: None,
                })
            }
            PicardStatus::Crossed => {
                let outcome = self.shoot_outcome(alpha, beta, UndeterminedReason::GridCap);
                Ok(Classification {
                    outcome,
                    solution: self.pair_from(alpha, beta, run, outcome),
                    supersolution: None,
                })
            }
            PicardStatus::Converged => {
                let sup = sup2(&run.u, &run.v);
                if run.clamped {
                    // The sweep only saw the clamped nonlinearity; let the
                    // unclamped shooting solve decide.
                    let outcome = self.shoot_outcome(alpha, beta, UndeterminedReason::Overflow);
                    return Ok(Classification {
                        outcome,
                        solution: self.pair_from(alpha, beta, run, outcome),
                        supersolution: None,
                    });
                }
                if sup >= self.cfg.band_low {
                    if self.cfg.extend_in_band {
                        let cfg = SolverConfig {
                            r_max: 2.0 * self.cfg.r_max,
                            extend_in_band: false,
                            ..self.cfg
                        };
                        return Solver::new(&self.spec, &cfg)?.classify_detailed(alpha, beta);
                    }
                    let outcome = ClassifyOutcome::Undetermined {
                        reason: UndeterminedReason::ThresholdBand,
                    };
                    return Ok(Classification {
                        outcome,
                        solution: self.pair_from(alpha, beta, run, outcome),
                        supersolution: None,
                    });
                }
                let sup_sol = self.supersolution(alpha + beta)?;
                let slack = self.cfg.comparison_slack;
                let dominated = sup_sol
                    .values
                    .iter()
                    .enumerate()
                    .all(|(i, &w)| w >= (run.u[i] + run.v[i]) * (1.0 - slack));
                let outcome = if dominated {
                    ClassifyOutcome::Entire {
                        sup,
                        growth_exponent: self.growth_exponent(&run.u, &run.v),
                    }
                } else {
                    ClassifyOutcome::Undetermined {
                        reason: UndeterminedReason::ComparisonFailed,
                    }
                };
                Ok(Classification {
                    outcome,
                    solution: self.pair_from(alpha, beta, run, outcome),
                    supersolution: Some(sup_sol),
                })
            }
        }
    }
}

fn sup2(u: &[f64], v: &[f64]) -> f64 {
    u.iter().chain(v).fold(0.0, |a: f64, &b| a.max(b))
}

fn last_large(traj: &Trajectory<4>) -> Component {
    let y = traj.states.last().unwrap();
    if y[0] >= y[2] {
        Component::U
    } else {
        Component::V
    }
}

/// Scalar supersolution sampled at `radii` (increasing, starting at 0).
fn supersolution_on(spec: &ProblemSpec, w0: f64, radii: &[f64], cfg: &SolverConfig) -> Result<ScalarSolution> {
    if !(w0 > 0.0 && w0.is_finite()) {
        return Err(Error::InvalidInput(format!("W0 must be positive, got {w0}")));
    }
    let nl = &spec.nonlin;
    let n1 = (spec.n - 1) as f64;
    let nf = spec.n as f64;
    let rhs = |r: f64, y: &[f64; 2]| {
        let w = y[0].max(0.0);
        let src = (spec.p.eval(r) + spec.q.eval(r)) * nl.diagonal_sum(w);
        if r == 0.0 {
            [y[1], src / nf]
        } else {
            [y[1], src - n1 / r * y[1]]
        }
    };
    let r_end = *radii.last().unwrap();
    let traj = ode::integrate(&rhs, 0.0, [w0, 0.0], r_end, &[0], &cfg.ode_options());
    let blowup = match traj.stop {
        OdeStop::End => None,
        OdeStop::Crossed { radius, cell, .. } => Some(BlowUp { radius, cell }),
        OdeStop::StepUnderflow { radius } => Some(BlowUp { radius, cell: 0.0 }),
        OdeStop::MaxSteps { radius } => return Err(Error::NonFinite { radius }),
    };
    let reach = blowup.map_or(f64::INFINITY, |b| b.radius);
    let upto = radii.partition_point(|&r| r < reach && r <= *traj.radii.last().unwrap());
    let values: Vec<f64> = ode::hermite_resample(&traj, 0, 1, &radii[..upto])
        .into_iter()
        .map(|x| x.unwrap())
        .collect();
    Ok(ScalarSolution {
        radii: radii.to_vec(),
        values,
        blowup,
    })
}

/// Monotone iteration of `spec` on an explicit grid.
pub fn monotone_iterate(
    spec: &ProblemSpec,
    alpha: f64,
    beta: f64,
    grid: &RadialGrid,
    cfg: &SolverConfig,
) -> Result<SolutionPair> {
    Solver::with_grid(spec, cfg, grid.clone())?.monotone_iterate(alpha, beta)
}

/// Scalar supersolution of `spec` from `W(0) = w0`, sampled on `grid`.
pub fn supersolution(spec: &ProblemSpec, w0: f64, grid: &RadialGrid) -> Result<ScalarSolution> {
    supersolution_on(spec, w0, grid.radii(), &SolverConfig::default())
}

pub fn classify(spec: &ProblemSpec, alpha: f64, beta: f64, cfg: &SolverConfig) -> Result<ClassifyOutcome> {
    Solver::new(spec, cfg)?.classify(alpha, beta)
}

/// Blow-up radii `R_k` for the perturbed data `(α + 1/k, β + 1/k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupSequence {
    pub ks: Vec<u32>,
    pub radii: Vec<f64>,
    /// Resolution of each radius (final refinement cell width).
    pub cells: Vec<f64>,
    /// Aitken extrapolation of the last three radii when their increments
    /// shrink geometrically; `None` when they do not.
    pub limit: Option<f64>,
}

impl BlowupSequence {
    /// `R_{k_{i+1}} ≥ R_{k_i} − cells_allowed·max(cell)` for every consecutive pair.
    pub fn is_nondecreasing_within(&self, cells_allowed: f64) -> bool {
        self.radii.windows(2).zip(self.cells.windows(2)).all(|(r, c)| {
            let slack = cells_allowed * c[0].max(c[1]);
            r[1] >= r[0] - slack
        })
    }
}

pub fn blowup_radius_sequence(
    spec: &ProblemSpec,
    alpha: f64,
    beta: f64,
    k_list: &[u32],
    cfg: &SolverConfig,
) -> Result<BlowupSequence> {
    let solver = Solver::new(spec, cfg)?;
    blowup_radius_sequence_with(&solver, alpha, beta, k_list)
}

pub fn blowup_radius_sequence_with(solver: &Solver, alpha: f64, beta: f64, k_list: &[u32]) -> Result<BlowupSequence> {
    let mut radii = Vec::with_capacity(k_list.len());
    let mut cells = Vec::with_capacity(k_list.len());
    for &k in k_list {
        if k == 0 {
            return Err(Error::InvalidInput("k must be positive".into()));
        }
        let d = 1.0 / k as f64;
        match solver.classify(alpha + d, beta + d)? {
            ClassifyOutcome::FiniteBlowUp { radius, cell, .. } => {
                radii.push(radius);
                cells.push(cell);
            }
            other => {
                return Err(Error::EdgeHypothesis {
                    k,
                    outcome: other.to_string(),
                })
            }
        }
    }
    let limit = match radii.len() {
        0 => None,
        1 | 2 => None,
        l => {
            let (a, b, c) = (radii[l - 3], radii[l - 2], radii[l - 1]);
            let (d1, d2) = (b - a, c - b);
            if d1 > 0.0 && d2 >= 0.0 && d2 < d1 {
                let q = d2 / d1;
                Some(c + d2 * q / (1.0 - q))
            } else {
                None
            }
        }
    };
    Ok(BlowupSequence {
        ks: k_list.to_vec(),
        radii,
        cells,
        limit,
    })
}

/// Result of the Keller–Osserman barrier computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barrier {
    /// Root `R_a` of `Q_{R₀}(R_a) = ∫_a^∞ dτ/ℓ(τ)`, or `None` when
    /// `Q_{R₀}(∞)` does not reach the right-hand side.
    pub radius: Option<f64>,
    /// `∫_a^∞ dτ/ℓ(τ) = C_f(∞) − C_f(a)`.
    pub remaining: f64,
    pub q_infinity: f64,
}

/// Solves `C_f(a) + Q_{R₀}(R_a) = C_f(∞)` for `R_a`. Because `C_f` is a
/// primitive, the equation depends on `a` only through `∫_a^∞ dτ/ℓ`, and the
/// base point `s*` drops out.
///
/// Along the barrier `C_f(y(r)) ≤ C_f(a) + Q_{R₀}(r)`, so `R_a` is a lower
/// bound for the barrier's own blow-up radius.
pub fn barrier_blowup_radius<L: Fn(f64) -> f64>(ell: L, w: &Weight, r0: f64, a: f64, n: u32) -> Result<Barrier> {
    if !(a > 0.0) {
        return Err(Error::InvalidInput(format!("barrier needs a > 0, got {a}")));
    }
    let remaining = match ko::primitive_cf_infinity(&ell, a)? {
        IntegralVerdict::Finite { value, .. } => value,
        IntegralVerdict::Infinite { .. } => {
            return Err(Error::Precondition(
                "C_f(∞) is infinite: ℓ fails the Keller–Osserman condition".into(),
            ))
        }
    };
    let q_inf = match problem::q_infinity(w, r0, n)? {
        IntegralVerdict::Finite { value, .. } => value,
        IntegralVerdict::Infinite { .. } => f64::INFINITY,
    };
    if q_inf <= remaining {
        return Ok(Barrier {
            radius: None,
            remaining,
            q_infinity: q_inf,
        });
    }
    // Bracket by doubling, then bisect on the truncated potential.
    let q_at = |r: f64| -> Result<f64> { Ok(problem::q_truncated(w, r0, r, n)?.value) };
    let mut lo = r0;
    let mut hi = 2.0 * r0;
    while q_at(hi)? < remaining {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Ok(Barrier {
                radius: None,
                remaining,
                q_infinity: q_inf,
            });
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if q_at(mid)? < remaining {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(Barrier {
        radius: Some(0.5 * (lo + hi)),
        remaining,
        q_infinity: q_inf,
    })
}

/// Direct integration of the barrier `y'' + ((n−1)/r)y' = w(r)·ℓ(y)`,
/// `y(R₀) = a`, `y'(R₀) = 0`, up to `r_end` or the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierPath {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub blowup: Option<f64>,
}

pub fn barrier_direct<L: Fn(f64) -> f64>(
    ell: L,
    w: &Weight,
    r0: f64,
    a: f64,
    n: u32,
    r_end: f64,
    threshold: f64,
) -> Result<BarrierPath> {
    if !(r0 > 0.0 && r_end > r0) {
        return Err(Error::InvalidInput(format!(
            "barrier needs 0 < R0 < r_end, got {r0}, {r_end}"
        )));
    }
    let n1 = (n - 1) as f64;
    let rhs = |r: f64, y: &[f64; 2]| [y[1], w.eval(r) * ell(y[0].max(0.0)) - n1 / r * y[1]];
    let opts = OdeOptions {
        threshold,
        ..OdeOptions::default()
    };
    let traj = ode::integrate(&rhs, r0, [a, 0.0], r_end, &[0], &opts);
    let blowup = match traj.stop {
        OdeStop::Crossed { radius, .. } | OdeStop::StepUnderflow { radius } => Some(radius),
        _ => None,
    };
    Ok(BarrierPath {
        values: traj.states.iter().map(|s| s[0]).collect(),
        radii: traj.radii,
        blowup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{NonlinearPair, Nonlinearity};
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

    fn scalar_blowup() -> ProblemSpec {
        ProblemSpec::new(
            3,
            Weight::quadratic(6.0, 2.0),
            Weight::zero(),
            NonlinearPair::power(0.5, 3.0, 0.0, 0.5, 0.0, 3.0),
        )
        .unwrap()
    }

    fn small_cfg(r_max: f64, h: f64) -> SolverConfig {
        SolverConfig {
            r_max,
            spacing: h,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn zero_weights_give_constants_after_one_sweep() {
        let spec = ProblemSpec::new(3, Weight::zero(), Weight::zero(), manufactured().nonlin).unwrap();
        let s = Solver::new(&spec, &small_cfg(5.0, 0.05)).unwrap();
        let sol = s.monotone_iterate(0.7, 1.3).unwrap();
        assert_eq!(sol.iterations_used, 1);
        assert!(sol.u.iter().all(|&x| x == 0.7) && sol.v.iter().all(|&x| x == 1.3));
        let w = s.supersolution(2.0).unwrap();
        assert!(w.values.iter().all(|&x| x == 2.0));
        assert!(s.classify(0.7, 1.3).unwrap().is_entire());
    }

    #[test]
    fn manufactured_solution_reproduced() {
        let spec = manufactured();
        let grid = RadialGrid::uniform(10.0, 1e-2).unwrap();
        let sol = monotone_iterate(&spec, 1.0, 1.0, &grid, &small_cfg(10.0, 1e-2)).unwrap();
        assert_eq!(sol.u[0], 1.0);
        assert_eq!(sol.monotonicity_violations, 0);
        for (r, (u, v)) in grid.radii().iter().zip(sol.u.iter().zip(&sol.v)) {
            let exact = 1.0 + r * r;
            assert_relative_eq!(*u, exact, max_relative = 1e-5);
            assert_relative_eq!(*v, exact, max_relative = 1e-5);
        }
    }

    #[test]
    fn supersolution_dominates_manufactured_pair() {
        let spec = manufactured();
        let grid = RadialGrid::uniform(10.0, 1e-2).unwrap();
        let sol = monotone_iterate(&spec, 1.0, 1.0, &grid, &small_cfg(10.0, 1e-2)).unwrap();
        let w = supersolution(&spec, 3.0, &grid).unwrap();
        for (i, wv) in w.values.iter().enumerate() {
            assert!(*wv >= sol.u[i] + sol.v[i]);
        }
    }

    #[test]
    fn scalar_blowup_radius() {
        let grid = RadialGrid::uniform(3.0, 1e-2).unwrap();
        let w = supersolution(&scalar_blowup(), 1.0, &grid).unwrap();
        let b = w.blowup.unwrap();
        assert!((b.radius - 1.0).abs() < 1e-3, "{b:?}");
        // 1/(1 − r²) on the sampled part
        for (r, v) in grid.radii().iter().zip(&w.values).take(80) {
            assert_relative_eq!(*v, 1.0 / (1.0 - r * r), max_relative = 1e-6);
        }
    }

    #[test]
    fn system_wrapped_blowup_is_classified() {
        let spec = ProblemSpec::new(
            3,
            Weight::quadratic(3.0, 1.0),
            Weight::quadratic(3.0, 1.0),
            NonlinearPair::power(8.0, 2.0, 1.0, 8.0, 1.0, 2.0),
        )
        .unwrap();
        match classify(&spec, 0.5, 0.5, &small_cfg(5.0, 0.01)).unwrap() {
            ClassifyOutcome::FiniteBlowUp { radius, .. } => assert!((radius - 1.0).abs() < 5e-3, "{radius}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn clamped_sweep_defers_to_shooting() {
        let spec = ProblemSpec::new(
            3,
            Weight::quadratic(3.0, 1.0),
            Weight::quadratic(3.0, 1.0),
            NonlinearPair::power(8.0, 2.0, 1.0, 8.0, 1.0, 2.0),
        )
        .unwrap();
        let cfg = SolverConfig {
            clamp: 50.0,
            ..small_cfg(5.0, 0.01)
        };
        let c = Solver::new(&spec, &cfg).unwrap().classify_detailed(0.5, 0.5).unwrap();
        assert!(c.solution.clamped);
        match c.outcome {
            ClassifyOutcome::FiniteBlowUp { radius, .. } => assert!((radius - 1.0).abs() < 5e-3, "{radius}"),
            other => panic!("{other:?}"),
        }
        // Bounded data whose sweep trips the clamp stays undetermined.
        let zero = ProblemSpec::new(
            3,
            Weight::zero(),
            Weight::zero(),
            NonlinearPair::power(1.0, 2.0, 2.0, 1.0, 2.0, 2.0),
        )
        .unwrap();
        let cfg = SolverConfig {
            clamp: 1.0,
            ..small_cfg(2.0, 0.1)
        };
        let out = Solver::new(&zero, &cfg).unwrap().classify(2.0, 2.0).unwrap();
        assert_eq!(
            out,
            ClassifyOutcome::Undetermined {
                reason: UndeterminedReason::Overflow
            }
        );
    }

    #[test]
    fn classification_is_monotone_in_data() {
        let spec = ProblemSpec::new(
            3,
            Weight::exponential(1.0, 1.0),
            Weight::exponential(1.0, 1.0),
            NonlinearPair::power(1.0, 2.0, 2.0, 1.0, 2.0, 2.0),
        )
        .unwrap();
        let s = Solver::new(&spec, &small_cfg(30.0, 0.02)).unwrap();
        assert!(s.classify(0.5, 0.5).unwrap().is_entire());
        assert!(s.classify(1.5, 1.5).unwrap().is_blowup());
        assert!(!s.classify(2.0, 1.6).unwrap().is_entire());
    }

    #[test]
    fn blowup_sequence_and_edge_violation() {
        let spec = scalar_blowup();
        let s = Solver::new(&spec, &small_cfg(3.0, 0.01)).unwrap();
        // Data √2 blows up at 1 for the system (u = w/√2·…): just check order.
        let seq = blowup_radius_sequence_with(&s, 1.0, 0.5, &[1, 2, 4, 8]).unwrap();
        assert!(seq.is_nondecreasing_within(2.0), "{seq:?}");
        let entire_spec = ProblemSpec::new(3, Weight::zero(), Weight::zero(), manufactured().nonlin).unwrap();
        let e = Solver::new(&entire_spec, &small_cfg(5.0, 0.05)).unwrap();
        assert!(matches!(
            blowup_radius_sequence_with(&e, 1.0, 1.0, &[1]),
            Err(Error::EdgeHypothesis { k: 1, .. })
        ));
    }

    #[test]
    fn barrier_root_and_direct_comparison() {
        let ell = |t: f64| t * t;
        let w = Weight::exponential(1.0, 1.0);
        // C_f(a) = 0.9·C_f(∞) with s* = 1 means a = 10.
        let b = barrier_blowup_radius(ell, &w, 1.0, 10.0, 3).unwrap();
        assert_relative_eq!(b.remaining, 0.1, max_relative = 1e-10);
        let ra = b.radius.unwrap();
        assert_relative_eq!(
            problem::q_truncated(&w, 1.0, ra, 3).unwrap().value,
            0.1,
            max_relative = 1e-8
        );
        let path = barrier_direct(ell, &w, 1.0, 10.0, 3, 50.0, 1e8).unwrap();
        let rb = path.blowup.unwrap();
        assert!(rb > ra, "direct blow-up {rb} before the KO radius {ra}");
        // Along the barrier C_f(y) ≤ C_f(a) + Q(r), i.e. y ≤ 1/(0.1 − Q(r)).
        for (r, y) in path.radii.iter().zip(&path.values) {
            if *r >= ra {
                break;
            }
            let q = problem::q_truncated(&w, 1.0, *r, 3).unwrap().value;
            assert!(*y <= 1.0 / (0.1 - q) * (1.0 + 1e-7));
        }
        // a = s*: C_f(a) = 0, remaining 1 > Q_1(∞) = 2/e.
        assert!(barrier_blowup_radius(ell, &w, 1.0, 1.0, 3).unwrap().radius.is_none());
        assert!(matches!(
            barrier_blowup_radius(|t: f64| t, &w, 1.0, 2.0, 3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn invalid_inputs() {
        let spec = manufactured();
        let s = Solver::new(&spec, &small_cfg(2.0, 0.1)).unwrap();
        assert!(s.classify(0.0, 1.0).is_err());
        assert!(s.classify(1.0, f64::NAN).is_err());
        let bad = SolverConfig {
            tol_fixed_point: 2.0,
            ..SolverConfig::default()
        };
        assert!(Solver::new(&spec, &bad).is_err());
        let nl = NonlinearPair::new(
            Nonlinearity::custom("1+st", |s, t| 1.0 + s * t),
            Nonlinearity::power(1.0, 1.0, 1.0),
        );
        let spec = ProblemSpec::new(3, Weight::zero(), Weight::zero(), nl).unwrap();
        assert!(Solver::new(&spec, &small_cfg(2.0, 0.1)).is_err());
    }
}
