use entire_core::solver::Classification;
use entire_core::{Solver, SolverConfig};

use super::outcome_lines;
use crate::error::CliError;
use crate::output::{csv_bytes, num, Report};
use crate::specfile::LoadedSpec;
use crate::{Central, Context};

fn classify_at(ctx: &mut Context<'_>, c: &Central) -> Result<(LoadedSpec, SolverConfig, Classification), CliError> {
    let (loaded, cfg) = ctx.load_spec(None)?;
    let solver = Solver::new(&loaded.spec, &cfg)?;
    let detailed = solver.classify_detailed(c.alpha, c.beta)?;
    Ok((loaded, cfg, detailed))
}

fn header(r: &mut Report, loaded: &LoadedSpec, cfg: &SolverConfig, c: &Central) {
    r.kv("spec", &loaded.name)
        .num("alpha", c.alpha)
        .num("beta", c.beta)
        .num("r_max", cfg.r_max)
        .num("spacing", cfg.spacing);
}

pub fn solve(ctx: &mut Context<'_>, c: &Central) -> Result<(), CliError> {
    let (loaded, cfg, detailed) = classify_at(ctx, c)?;
    let sol = &detailed.solution;
    // Rows stop before the first node at or past the threshold; beyond it the
    // sampled iterate carries no information.
    let rows: Vec<[String; 3]> = sol
        .grid
        .radii()
        .iter()
        .zip(sol.u.iter().zip(&sol.v))
        .take_while(|(_, (u, v))| u.is_finite() && v.is_finite() && u.max(**v) < cfg.blowup_threshold)
        .map(|(r, (u, v))| [num(*r), num(*u), num(*v)])
        .collect();
    let n_rows = rows.len();
    ctx.out.write("solution.csv", &csv_bytes(&["r", "u", "v"], rows)?)?;

    let mut r = Report::new();
    header(&mut r, &loaded, &cfg, c);
    outcome_lines(&mut r, "", &detailed.outcome);
    r.kv("iterations", sol.iterations_used)
        .kv("residual", sol.residual.map(num).unwrap_or_else(|| "n/a".into()))
        .kv("monotonicity_violations", sol.monotonicity_violations)
        .kv("clamped", sol.clamped)
        .kv("rows", n_rows)
        .num("solution_r_end", sol.grid.r_max());
    if let Some(sup) = &detailed.supersolution {
        r.kv(
            "supersolution_blowup",
            sup.blowup.map(|b| num(b.radius)).unwrap_or_else(|| "none".into()),
        );
    }
    ctx.emit("solve.txt", &r)?;
    if sol.monotonicity_violations > 0 {
        return Err(CliError::Solver(format!(
            "{} Picard iterates decreased at some node",
            sol.monotonicity_violations
        )));
    }
    Ok(())
}

pub fn classify(ctx: &mut Context<'_>, c: &Central) -> Result<(), CliError> {
    let (loaded, cfg, detailed) = classify_at(ctx, c)?;
    let mut r = Report::new();
    header(&mut r, &loaded, &cfg, c);
    outcome_lines(&mut r, "", &detailed.outcome);
    ctx.emit("classify.txt", &r)
}
