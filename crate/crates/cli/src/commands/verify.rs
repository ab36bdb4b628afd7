use std::path::Path;

use entire_core::verify::{
    check_divergence, check_lower_bound, residual_from, validate_hypotheses, DivergenceReport, GrowthVerdict,
    LowerBoundReport,
};
use entire_core::{ClassifyOutcome, Error, ProblemSpec, RadialGrid, SolutionPair};

use crate::error::CliError;
use crate::output::{csv_bytes, num, opt_num, Report};
use crate::{Context, VerifyArgs, What};

/// Reads an `r,u,v` table as written by `solve`. The table carries no
/// classification, so the pair is marked entire on its span.
pub fn read_solution_csv(path: &Path) -> Result<SolutionPair, CliError> {
    let bad = |m: String| CliError::BadArgs(format!("{}: {m}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column {name}")))
    };
    let (ci, ui, vi) = (col("r")?, col("u")?, col("v")?);
    let (mut r, mut u, mut v) = (Vec::new(), Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| bad(format!("row {}: column {i} is not a number", line + 2)))
        };
        r.push(field(ci)?);
        u.push(field(ui)?);
        v.push(field(vi)?);
    }
    if u.is_empty() {
        return Err(bad("no rows".into()));
    }
    let grid = RadialGrid::from_radii(r).map_err(|e| bad(e.to_string()))?;
    let sup = u.iter().zip(&v).map(|(a, b)| a.max(*b)).fold(0.0, f64::max);
    Ok(SolutionPair {
        grid,
        alpha: u[0],
        beta: v[0],
        u,
        v,
        status: ClassifyOutcome::Entire {
            sup,
            growth_exponent: None,
        },
        iterations_used: 0,
        residual: None,
        monotonicity_violations: 0,
        clamped: false,
    })
}

pub fn lower_bound_lines(r: &mut Report, prefix: &str, lb: &LowerBoundReport) {
    r.kv(format!("{prefix}samples"), lb.radii.len())
        .kv(format!("{prefix}applicable_from"), opt_num(lb.applicable_from))
        .kv(
            format!("{prefix}worst_margin_applicable"),
            opt_num(lb.worst_margin_applicable()),
        )
        .kv(format!("{prefix}worst_margin"), num(lb.worst_margin()));
}

pub fn lower_bound_rows(lb: &LowerBoundReport) -> impl Iterator<Item = [String; 4]> + '_ {
    (0..lb.radii.len()).map(|i| [num(lb.radii[i]), num(lb.lhs[i]), num(lb.rhs[i]), num(lb.margin[i])])
}

fn growth_lines(r: &mut Report, name: &str, g: &GrowthVerdict) {
    match g.fit {
        Some(f) => {
            let (lo, hi) = f.band95();
            r.kv(format!("{name}.exponent"), num(f.slope))
                .kv(format!("{name}.exponent_se"), num(f.slope_se))
                .kv(format!("{name}.band95"), format!("{},{}", num(lo), num(hi)))
                .kv(format!("{name}.diverges"), g.diverges);
        }
        None => {
            r.kv(format!("{name}.exponent"), "no fit")
                .kv(format!("{name}.diverges"), false);
        }
    }
}

pub fn divergence_lines(r: &mut Report, prefix: &str, d: &DivergenceReport) {
    growth_lines(r, &format!("{prefix}u"), &d.u);
    growth_lines(r, &format!("{prefix}v"), &d.v);
    growth_lines(r, &format!("{prefix}w"), &d.w);
    r.kv(format!("{prefix}F_inf_finite"), d.f_inf_finite)
        .kv(format!("{prefix}G_inf_finite"), d.g_inf_finite)
        .kv(format!("{prefix}at_least_one_diverges"), d.at_least_one())
        .kv(format!("{prefix}both_expected"), d.both_expected())
        .kv(format!("{prefix}consistent"), d.consistent());
}

pub fn verify(ctx: &mut Context<'_>, a: &VerifyArgs) -> Result<(), CliError> {
    let (loaded, _) = ctx.load_spec(None)?;
    let spec = &loaded.spec;
    let mut r = Report::new();
    r.kv("spec", &loaded.name);
    if a.what == What::Hypotheses {
        let rep = validate_hypotheses(spec);
        for line in &rep.lines {
            r.kv(
                line.clause,
                format!("{} ({})", if line.passed { "pass" } else { "FAIL" }, line.detail),
            );
        }
        r.kv("all_passed", rep.all_passed());
        ctx.emit("hypotheses.txt", &r)?;
        return if rep.all_passed() {
            Ok(())
        } else {
            Err(CliError::Hypothesis("see hypotheses.txt".into()))
        };
    }
    let input = a
        .input
        .as_ref()
        .ok_or_else(|| CliError::BadArgs("--input <solution.csv> is required".into()))?;
    let sol = read_solution_csv(input)?;
    r.kv("input", input.display()).kv("rows", sol.u.len());
    match a.what {
        What::Residual => residual(ctx, a, spec, &sol, r),
        What::LowerBound => lower_bound(ctx, a, spec, &sol, r),
        What::Divergence => divergence(ctx, spec, &sol, r),
        What::Hypotheses => unreachable!(),
    }
}

fn residual(
    ctx: &mut Context<'_>,
    a: &VerifyArgs,
    spec: &ProblemSpec,
    sol: &SolutionPair,
    mut r: Report,
) -> Result<(), CliError> {
    let from = a.from.unwrap_or(0.1 * sol.grid.r_max());
    let rep = residual_from(sol, spec, from)?;
    let rows = (0..rep.radii.len()).map(|i| [num(rep.radii[i]), num(rep.u[i]), num(rep.v[i])]);
    ctx.out
        .write("residual.csv", &csv_bytes(&["r", "residual_u", "residual_v"], rows)?)?;
    let passed = rep.max() <= a.residual_tol;
    r.num("from", from)
        .num("max_residual_u", rep.max_u)
        .num("argmax_u", rep.argmax_u)
        .num("max_residual_v", rep.max_v)
        .num("argmax_v", rep.argmax_v)
        .num("tolerance", a.residual_tol)
        .kv("passed", passed);
    ctx.emit("residual.txt", &r)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "residual {} exceeds {}",
            num(rep.max()),
            num(a.residual_tol)
        )))
    }
}

fn lower_bound(
    ctx: &mut Context<'_>,
    a: &VerifyArgs,
    spec: &ProblemSpec,
    sol: &SolutionPair,
    mut r: Report,
) -> Result<(), CliError> {
    let from = a.from.unwrap_or(0.0);
    r.num("from", from).num("slack", a.slack);
    let lb = match check_lower_bound(sol, spec, from) {
        Ok(lb) => lb,
        Err(Error::Inapplicable(why)) => {
            r.kv("status", "vacuous").kv("detail", why);
            return ctx.emit("lower_bound.txt", &r);
        }
        Err(e) => return Err(e.into()),
    };
    ctx.out.write(
        "lower_bound.csv",
        &csv_bytes(&["r", "lhs", "rhs", "margin"], lower_bound_rows(&lb))?,
    )?;
    lower_bound_lines(&mut r, "", &lb);
    let passed = lb.worst_margin_applicable().is_some_and(|m| m >= -a.slack);
    r.kv("status", if passed { "holds" } else { "violated" });
    ctx.emit("lower_bound.txt", &r)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification(
            "the lower bound does not hold at the end of the domain".into(),
        ))
    }
}

fn divergence(ctx: &mut Context<'_>, spec: &ProblemSpec, sol: &SolutionPair, mut r: Report) -> Result<(), CliError> {
    let d = check_divergence(sol, spec)?;
    divergence_lines(&mut r, "", &d);
    let status = if d.interior_like() {
        "interior"
    } else if d.consistent() {
        "consistent"
    } else {
        "inconsistent"
    };
    r.kv("status", status);
    if d.interior_like() {
        r.kv(
            "note",
            "neither component grows; such data lies inside the admissible set, not on its edge",
        );
    }
    ctx.emit("divergence.txt", &r)?;
    if status == "inconsistent" {
        Err(CliError::Verification(
            "both diagonal integrals are finite but only one component diverges".into(),
        ))
    } else {
        Ok(())
    }
}
