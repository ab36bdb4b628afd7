use entire_core::region::{
    check_downward_closure, explore, BoundingBox, ClosureReport, ExploreOptions, NodeResult, RegionBox, RegionMap,
    Resolution,
};
use entire_core::{Error, ProblemSpec, Solver, SolverConfig};

use super::r_est;
use crate::error::CliError;
use crate::output::{csv_bytes, num, opt_num, Report};
use crate::pool::RayonMapper;
use crate::{Context, RegionArgs};

pub fn parse_box(s: &str) -> Result<RegionBox, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::BadArgs(format!("--box {s}: {e}")))?;
    let [a0, a1, b0, b1] = parts[..] else {
        return Err(CliError::BadArgs(format!("--box expects a0,a1,b0,b1, got {s}")));
    };
    RegionBox::new(a0, a1, b0, b1).map_err(|e| CliError::BadArgs(format!("--box {s}: {e}")))
}

pub fn parse_res(s: &str) -> Result<Resolution, CliError> {
    let bad = || CliError::BadArgs(format!("--res expects NxM, got {s}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let na = a.trim().parse().map_err(|_| bad())?;
    let nb = b.trim().parse().map_err(|_| bad())?;
    Resolution::new(na, nb).map_err(|e| CliError::BadArgs(format!("--res {s}: {e}")))
}

fn tag(o: &NodeResult) -> &'static str {
    match o {
        Ok(o) => o.tag(),
        Err(_) => "fault",
    }
}

/// One row per node: `alpha,beta,outcome,r_est,in_g,in_g_delta`.
pub fn raster_csv(map: &RegionMap) -> Result<Vec<u8>, CliError> {
    let (na, nb) = (map.resolution.na, map.resolution.nb);
    let rows = (0..na).flat_map(|i| (0..nb).map(move |j| (i, j))).map(|(i, j)| {
        let o = map.outcome(i, j);
        [
            num(map.alpha(i)),
            num(map.beta(j)),
            tag(o).to_string(),
            o.as_ref().map(r_est).unwrap_or_default(),
            u8::from(map.is_entire(i, j)).to_string(),
            u8::from(map.in_g_delta(i, j)).to_string(),
        ]
    });
    csv_bytes(&["alpha", "beta", "outcome", "r_est", "in_g", "in_g_delta"], rows)
}

/// One row per ray with the bracket data; `status` is `edge` for points of
/// the edge set, `below_delta`, `no_edge` or `fault`.
pub fn edges_csv(map: &RegionMap) -> Result<Vec<u8>, CliError> {
    let header = [
        "ray",
        "angle",
        "status",
        "alpha",
        "beta",
        "t_inner",
        "t_outer",
        "width",
        "inner_alpha",
        "inner_beta",
        "outer_alpha",
        "outer_beta",
        "outer_radius",
        "band_lo",
        "band_hi",
        "classifications",
    ];
    let rows = map.rays.iter().enumerate().map(|(k, (angle, res))| {
        let mut row = vec![k.to_string(), num(*angle)];
        match res {
            Ok(e) => {
                let status = if e.point.0.min(e.point.1) > map.delta {
                    "edge"
                } else {
                    "below_delta"
                };
                row.extend([
                    status.to_string(),
                    num(e.point.0),
                    num(e.point.1),
                    num(e.t_inner),
                    num(e.t_outer),
                    num(e.width()),
                    num(e.inner.0),
                    num(e.inner.1),
                    num(e.outer.0),
                    num(e.outer.1),
                    num(e.outer_radius),
                    opt_num(e.undetermined_band.map(|b| b.0)),
                    opt_num(e.undetermined_band.map(|b| b.1)),
                    e.classifications.to_string(),
                ]);
            }
            Err(err) => {
                let status = if matches!(err, Error::NoEdge { .. }) {
                    "no_edge"
                } else {
                    "fault"
                };
                row.push(status.to_string());
                row.extend(std::iter::repeat_n(String::new(), header.len() - 3));
            }
        }
        row
    });
    csv_bytes(&header, rows)
}

fn bbox_text(b: Option<BoundingBox>) -> String {
    match b {
        Some(b) => format!(
            "i=[{},{}] j=[{},{}] alpha_max={} beta_max={}",
            b.i_min,
            b.i_max,
            b.j_min,
            b.j_max,
            num(b.alpha_max),
            num(b.beta_max)
        ),
        None => "empty".into(),
    }
}

pub fn region_summary(spec_name: &str, map: &RegionMap, closure: &ClosureReport, seed: u64) -> Report {
    let mut r = Report::new();
    let b = map.bounds;
    r.kv("spec", spec_name)
        .kv("provenance", &map.provenance)
        .kv(
            "box",
            format!("{},{},{},{}", num(b.a0), num(b.a1), num(b.b0), num(b.b1)),
        )
        .kv("resolution", format!("{}x{}", map.resolution.na, map.resolution.nb))
        .num("delta", map.delta);
    for t in ["entire", "blowup", "undetermined", "fault"] {
        r.kv(format!("nodes.{t}"), map.count(t));
    }
    let mut reasons: Vec<String> = map.undetermined_reasons().iter().map(|x| x.to_string()).collect();
    reasons.sort();
    let mut counts: Vec<(String, usize)> = Vec::new();
    for x in reasons {
        match counts.last_mut() {
            Some((k, c)) if *k == x => *c += 1,
            _ => counts.push((x, 1)),
        }
    }
    for (k, c) in counts {
        r.kv(format!("undetermined.{k}"), c);
    }
    r.kv("entire_bounding_box", bbox_text(map.entire_bounding_box()))
        .kv("g_delta_bounding_box", bbox_text(map.g_delta_bounding_box()))
        .kv("g_delta_inside_box", map.bounded_inside())
        .kv("diagonally_symmetric", map.is_diagonally_symmetric())
        .kv("rays", map.rays.len())
        .kv("edge_points", map.edge_points.len())
        .kv(
            "rays_without_edge",
            map.rays
                .iter()
                .filter(|(_, e)| matches!(e, Err(Error::NoEdge { .. })))
                .count(),
        )
        .kv(
            "max_edge_width",
            map.edge_points
                .iter()
                .map(|e| e.width())
                .reduce(f64::max)
                .map(num)
                .unwrap_or_default(),
        )
        .kv("closure.seed", seed)
        .kv("closure.pairs_checked", closure.pairs_checked)
        .kv("closure.pairs_skipped", closure.pairs_skipped)
        .kv("closure.violations", closure.violations.len());
    let cells = closure.violating_cells();
    if !cells.is_empty() {
        let shown: Vec<String> = cells.iter().take(20).map(|(i, j)| format!("({i},{j})")).collect();
        r.kv("closure.violating_cells", shown.join(" "));
    }
    r
}

/// Raster, rays and closure sampling for one sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepPlan {
    pub bounds: RegionBox,
    pub res: Resolution,
    pub delta: f64,
    pub opts: ExploreOptions,
    pub samples: usize,
}

/// Sweeps, extracts the edge, checks closure and writes the raster, the
/// edge table and the summary under `names`.
pub fn sweep_and_write(
    ctx: &mut Context<'_>,
    spec_name: &str,
    spec: &ProblemSpec,
    cfg: &SolverConfig,
    plan: &SweepPlan,
    names: [&str; 3],
) -> Result<(RegionMap, ClosureReport), CliError> {
    // Surface structural hypothesis failures before the sweep starts.
    Solver::new(spec, cfg)?;
    let mapper = RayonMapper::new(ctx.common.workers)?;
    let map = explore(spec, plan.bounds, plan.res, plan.delta, cfg, &plan.opts, &mapper)?;
    let closure = check_downward_closure(&map, plan.samples, ctx.common.seed);
    ctx.out.write(names[0], &raster_csv(&map)?)?;
    ctx.out.write(names[1], &edges_csv(&map)?)?;
    let summary = region_summary(spec_name, &map, &closure, ctx.common.seed);
    ctx.emit(names[2], &summary)?;
    if map.count("fault") > 0 {
        return Err(CliError::Solver(format!("{} raster nodes faulted", map.count("fault"))));
    }
    if !closure.violations.is_empty() {
        return Err(CliError::Verification(format!(
            "{} downward-closure violations",
            closure.violations.len()
        )));
    }
    Ok((map, closure))
}

pub fn region(ctx: &mut Context<'_>, a: &RegionArgs) -> Result<(), CliError> {
    let bounds = parse_box(&a.bounds)?;
    let res = parse_res(&a.res)?;
    let delta = a.delta.unwrap_or_else(|| bounds.default_delta());
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(CliError::BadArgs(format!("--delta must be positive, got {delta}")));
    }
    if a.edge_tol.is_nan() || a.edge_tol <= 0.0 {
        return Err(CliError::BadArgs("--edge-tol must be positive".into()));
    }
    let (loaded, cfg) = ctx.load_spec(None)?;
    let opts = ExploreOptions {
        rays: a.rays,
        edge: entire_core::region::EdgeOptions {
            tol: a.edge_tol,
            ..Default::default()
        },
    };
    let plan = SweepPlan {
        bounds,
        res,
        delta,
        opts,
        samples: a.samples,
    };
    sweep_and_write(
        ctx,
        &loaded.name,
        &loaded.spec,
        &cfg,
        &plan,
        ["raster.csv", "edges.csv", "region.txt"],
    )
    .map(|_| ())
}
