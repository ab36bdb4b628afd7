//! Bundled experiments.
//!
//! `figure1` sweeps the power-family spec over a box large enough to contain
//! `G_δ` and writes the three-region dataset: the raster marks `G` (entire)
//! and `G_δ`, and the edge table holds the points of `E(G_δ)`.
//!
//! `theorem3` locates the edge along a few rays, solves at the inner end of
//! each bracket and checks the lower bound for `u + v`, the growth dichotomy
//! and the monotonicity of the blow-up radii of perturbed data.

use entire_core::ko::{transform_h, S_MIN};
use entire_core::problem::potential_remainder;
use entire_core::region::{
    edge_bisect_with, ray_angles, ray_direction, EdgeOptions, EdgePoint, ExploreOptions, NodeMapper, RegionBox,
    Resolution,
};
use entire_core::solver::{blowup_radius_sequence_with, BlowupSequence};
use entire_core::verify::{check_divergence, check_lower_bound, DivergenceReport, LowerBoundReport};
use entire_core::{Error, ProblemSpec, SolutionPair, Solver, SolverConfig, Weight};

use super::outcome_lines;
use super::region::{sweep_and_write, SweepPlan};
use super::verify::{divergence_lines, lower_bound_lines};
use crate::error::CliError;
use crate::output::{csv_bytes, num, opt_num, Report};
use crate::pool::RayonMapper;
use crate::{Context, Target};

pub const DEFAULT_SPEC: &str = "power_2222";

/// Sweep box for the figure. Its default `δ` (0.2975) lies below the
/// diagonal edge, so `G_δ` is nonempty.
pub const FIGURE1_BOX: [f64; 4] = [0.05, 6.0, 0.05, 6.0];
pub const FIGURE1_RES: usize = 64;
pub const FIGURE1_SAMPLES: usize = 10_000;

pub const THEOREM3_RAYS: usize = 8;
pub const THEOREM3_ORIGIN: (f64, f64) = (0.05, 0.05);
pub const THEOREM3_EDGE_TOL: f64 = 1e-2;
pub const THEOREM3_KS: [u32; 4] = [1, 2, 4, 8];
/// Allowed negative lower-bound margin.
pub const LOWER_BOUND_SLACK: f64 = 1e-3;
/// Relative tolerance of `H(H⁻¹(y)) = y`.
pub const ROUND_TRIP_TOL: f64 = 1e-8;
/// Allowed decrease of consecutive blow-up radii, in refinement cells.
pub const RADII_CELLS: f64 = 2.0;

pub fn figure1_plan() -> SweepPlan {
    let [a0, a1, b0, b1] = FIGURE1_BOX;
    let bounds = RegionBox::new(a0, a1, b0, b1).expect("valid box");
    SweepPlan {
        bounds,
        res: Resolution::new(FIGURE1_RES, FIGURE1_RES).expect("valid resolution"),
        delta: bounds.default_delta(),
        opts: ExploreOptions::default(),
        samples: FIGURE1_SAMPLES,
    }
}

/// One ray of the theorem-3 experiment.
#[derive(Debug, Clone)]
pub struct EdgeCase {
    pub angle: f64,
    pub edge: Result<EdgePoint, Error>,
    /// Solution at the inner (entire) end of the bracket.
    pub solution: Option<SolutionPair>,
    pub lower_bound: Option<Result<LowerBoundReport, Error>>,
    /// `(y, H(H⁻¹(y)))` for every sampled remaining potential `y` whose
    /// inverse lies in the attainable range.
    pub round_trip: Vec<(f64, f64)>,
    pub divergence: Option<Result<DivergenceReport, Error>>,
    pub radii: Option<Result<BlowupSequence, Error>>,
}

impl EdgeCase {
    pub fn width_ok(&self) -> bool {
        self.edge.as_ref().is_ok_and(|e| e.width() <= THEOREM3_EDGE_TOL)
    }

    pub fn inner_entire(&self) -> bool {
        self.solution.as_ref().is_some_and(|s| s.status.is_entire())
    }

    pub fn lower_bound_ok(&self) -> bool {
        matches!(&self.lower_bound, Some(Ok(lb)) if lb.worst_margin_applicable().is_some_and(|m| m >= -LOWER_BOUND_SLACK))
    }

    pub fn round_trip_error(&self) -> f64 {
        self.round_trip
            .iter()
            .map(|(y, h)| ((h - y) / y).abs())
            .fold(0.0, f64::max)
    }

    pub fn round_trip_ok(&self) -> bool {
        !self.round_trip.is_empty() && self.round_trip_error() <= ROUND_TRIP_TOL
    }

    pub fn divergence_ok(&self) -> bool {
        matches!(&self.divergence, Some(Ok(d)) if d.consistent())
    }

    pub fn radii_ok(&self) -> bool {
        matches!(&self.radii, Some(Ok(s)) if s.is_nondecreasing_within(RADII_CELLS))
    }

    pub fn monotone(&self) -> bool {
        self.solution.as_ref().is_some_and(|s| s.monotonicity_violations == 0)
    }

    pub fn passed(&self) -> bool {
        self.width_ok()
            && self.inner_entire()
            && self.lower_bound_ok()
            && self.round_trip_ok()
            && self.divergence_ok()
            && self.radii_ok()
            && self.monotone()
    }
}

fn round_trip(spec: &ProblemSpec, lb: &LowerBoundReport) -> Result<Vec<(f64, f64)>, Error> {
    let remaining = potential_remainder(&Weight::sum(&spec.p, &spec.q), &lb.radii, spec.n)?;
    let mut out = Vec::new();
    for (y, s) in remaining.into_iter().zip(&lb.rhs) {
        if *s > S_MIN {
            let h = transform_h(&spec.nonlin, *s)?;
            out.push((y, h.value().unwrap_or(f64::INFINITY)));
        }
    }
    Ok(out)
}

fn edge_case(solver: &Solver, spec: &ProblemSpec, angle: f64) -> Result<EdgeCase, Error> {
    let opts = EdgeOptions {
        tol: THEOREM3_EDGE_TOL,
        ..EdgeOptions::default()
    };
    let edge = edge_bisect_with(solver, THEOREM3_ORIGIN, ray_direction(angle), &opts);
    let mut case = EdgeCase {
        angle,
        edge,
        solution: None,
        lower_bound: None,
        round_trip: Vec::new(),
        divergence: None,
        radii: None,
    };
    let Ok(e) = &case.edge else {
        return Ok(case);
    };
    let (a, b) = e.inner;
    let sol = solver.classify_detailed(a, b)?.solution;
    let lb = check_lower_bound(&sol, spec, 0.0);
    if let Ok(lb) = &lb {
        case.round_trip = round_trip(spec, lb)?;
    }
    case.lower_bound = Some(lb);
    case.divergence = Some(check_divergence(&sol, spec));
    case.radii = Some(blowup_radius_sequence_with(solver, a, b, &THEOREM3_KS));
    case.solution = Some(sol);
    Ok(case)
}

/// Runs the theorem-3 experiment along [`THEOREM3_RAYS`] rays.
pub fn theorem3_cases<M: NodeMapper>(
    spec: &ProblemSpec,
    cfg: &SolverConfig,
    mapper: &M,
) -> Result<Vec<EdgeCase>, Error> {
    let solver = Solver::new(spec, cfg)?;
    let angles = ray_angles(THEOREM3_RAYS);
    mapper
        .map(angles.len(), |k| edge_case(&solver, spec, angles[k]))
        .into_iter()
        .collect()
}

fn err_text<T>(r: &Option<Result<T, Error>>) -> Option<String> {
    match r {
        Some(Err(e)) => Some(e.to_string()),
        _ => None,
    }
}

fn theorem3(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let (loaded, cfg) = ctx.load_spec(Some(DEFAULT_SPEC))?;
    let mapper = RayonMapper::new(ctx.common.workers)?;
    let cases = theorem3_cases(&loaded.spec, &cfg, &mapper)?;

    let edge_rows = cases.iter().enumerate().map(|(k, c)| {
        let mut row = vec![k.to_string(), num(c.angle)];
        match &c.edge {
            Ok(e) => row.extend([
                "edge".to_string(),
                num(e.inner.0),
                num(e.inner.1),
                num(e.outer.0),
                num(e.outer.1),
                num(e.width()),
                num(e.outer_radius),
            ]),
            Err(e) => {
                row.push(
                    if matches!(e, Error::NoEdge { .. }) {
                        "no_edge"
                    } else {
                        "fault"
                    }
                    .to_string(),
                );
                row.extend(std::iter::repeat_n(String::new(), 6));
            }
        }
        row.push(
            c.solution
                .as_ref()
                .map(|s| s.status.tag().to_string())
                .unwrap_or_default(),
        );
        row
    });
    let header = [
        "ray",
        "angle",
        "status",
        "inner_alpha",
        "inner_beta",
        "outer_alpha",
        "outer_beta",
        "width",
        "outer_radius",
        "inner_outcome",
    ];
    ctx.out.write("theorem3_edges.csv", &csv_bytes(&header, edge_rows)?)?;

    let mut lb_rows = Vec::new();
    for (k, c) in cases.iter().enumerate() {
        if let Some(Ok(lb)) = &c.lower_bound {
            for i in 0..lb.radii.len() {
                lb_rows.push([
                    k.to_string(),
                    num(lb.radii[i]),
                    num(lb.lhs[i]),
                    num(lb.rhs[i]),
                    num(lb.margin[i]),
                ]);
            }
        }
    }
    ctx.out.write(
        "theorem3_lower_bound.csv",
        &csv_bytes(&["ray", "r", "lhs", "rhs", "margin"], lb_rows)?,
    )?;

    let mut div_rows = Vec::new();
    for (k, c) in cases.iter().enumerate() {
        if let Some(Ok(d)) = &c.divergence {
            for (name, g) in [("u", &d.u), ("v", &d.v), ("w", &d.w)] {
                let fit = g.fit.map(|f| (f.slope, f.slope_se, f.band95()));
                div_rows.push([
                    k.to_string(),
                    name.to_string(),
                    opt_num(fit.map(|f| f.0)),
                    opt_num(fit.map(|f| f.1)),
                    opt_num(fit.map(|f| f.2 .0)),
                    opt_num(fit.map(|f| f.2 .1)),
                    u8::from(g.diverges).to_string(),
                ]);
            }
        }
    }
    ctx.out.write(
        "theorem3_divergence.csv",
        &csv_bytes(
            &[
                "ray",
                "component",
                "exponent",
                "exponent_se",
                "band_lo",
                "band_hi",
                "diverges",
            ],
            div_rows,
        )?,
    )?;

    let mut radii_rows = Vec::new();
    for (k, c) in cases.iter().enumerate() {
        if let (Some(Ok(s)), Ok(e)) = (&c.radii, &c.edge) {
            for i in 0..s.radii.len() {
                let d = 1.0 / s.ks[i] as f64;
                radii_rows.push([
                    k.to_string(),
                    s.ks[i].to_string(),
                    num(e.inner.0 + d),
                    num(e.inner.1 + d),
                    num(s.radii[i]),
                    num(s.cells[i]),
                ]);
            }
        }
    }
    ctx.out.write(
        "theorem3_radii.csv",
        &csv_bytes(&["ray", "k", "alpha", "beta", "radius", "cell"], radii_rows)?,
    )?;

    let mut r = Report::new();
    r.kv("spec", &loaded.name)
        .kv("rays", cases.len())
        .kv(
            "origin",
            format!("{},{}", num(THEOREM3_ORIGIN.0), num(THEOREM3_ORIGIN.1)),
        )
        .num("edge_tol", THEOREM3_EDGE_TOL)
        .num("lower_bound_slack", LOWER_BOUND_SLACK);
    for (k, c) in cases.iter().enumerate() {
        let p = format!("ray{k}.");
        r.kv(format!("{p}angle"), num(c.angle));
        match &c.edge {
            Ok(e) => {
                r.kv(format!("{p}edge"), format!("{},{}", num(e.point.0), num(e.point.1)))
                    .kv(format!("{p}width"), num(e.width()));
            }
            Err(e) => {
                r.kv(format!("{p}edge"), e);
            }
        }
        if let Some(s) = &c.solution {
            outcome_lines(&mut r, &format!("{p}inner."), &s.status);
            r.kv(format!("{p}monotonicity_violations"), s.monotonicity_violations);
        }
        match &c.lower_bound {
            Some(Ok(lb)) => {
                lower_bound_lines(&mut r, &format!("{p}lower_bound."), lb);
                r.kv(format!("{p}round_trip_max_rel_error"), num(c.round_trip_error()));
            }
            other => {
                r.kv(format!("{p}lower_bound"), err_text(other).unwrap_or_default());
            }
        }
        match &c.divergence {
            Some(Ok(d)) => divergence_lines(&mut r, &format!("{p}divergence."), d),
            other => {
                r.kv(format!("{p}divergence"), err_text(other).unwrap_or_default());
            }
        }
        match &c.radii {
            Some(Ok(s)) => {
                let list: Vec<String> = s.radii.iter().map(|x| num(*x)).collect();
                r.kv(format!("{p}blowup_radii"), list.join(","))
                    .kv(format!("{p}blowup_radii_limit"), opt_num(s.limit))
                    .kv(
                        format!("{p}blowup_radii_nondecreasing"),
                        s.is_nondecreasing_within(RADII_CELLS),
                    );
            }
            other => {
                r.kv(format!("{p}blowup_radii"), err_text(other).unwrap_or_default());
            }
        }
        r.kv(format!("{p}passed"), c.passed());
    }
    let failed: Vec<usize> = cases
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.passed())
        .map(|(k, _)| k)
        .collect();
    r.kv("all_passed", failed.is_empty());
    ctx.emit("theorem3.txt", &r)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "rays {failed:?} failed; see theorem3.txt"
        )))
    }
}

pub fn reproduce(ctx: &mut Context<'_>, target: Target) -> Result<(), CliError> {
    match target {
        Target::Figure1 => {
            let (loaded, cfg) = ctx.load_spec(Some(DEFAULT_SPEC))?;
            sweep_and_write(
                ctx,
                &loaded.name,
                &loaded.spec,
                &cfg,
                &figure1_plan(),
                ["figure1_raster.csv", "figure1_edges.csv", "figure1.txt"],
            )
            .map(|_| ())
        }
        Target::Theorem3 => theorem3(ctx),
    }
}
