mod ko;
mod region;
pub mod reproduce;
mod solve;
mod verify;

use entire_core::ClassifyOutcome;

use crate::error::CliError;
use crate::output::{num, opt_num, Report};
use crate::{Command, Context};

pub use region::{edges_csv, raster_csv, region_summary};
pub use verify::read_solution_csv;

pub fn dispatch(cmd: &Command, ctx: &mut Context<'_>) -> Result<(), CliError> {
    match cmd {
        Command::Solve(c) => solve::solve(ctx, c),
        Command::Classify(c) => solve::classify(ctx, c),
        Command::Region(a) => region::region(ctx, a),
        Command::Ko => ko::ko(ctx),
        Command::Verify(a) => verify::verify(ctx, a),
        Command::Reproduce { target } => reproduce::reproduce(ctx, *target),
    }
}

/// `outcome`, then the fields of that outcome.
pub fn outcome_lines(r: &mut Report, prefix: &str, o: &ClassifyOutcome) {
    r.kv(format!("{prefix}outcome"), o.tag());
    match *o {
        ClassifyOutcome::Entire { sup, growth_exponent } => {
            r.kv(format!("{prefix}sup"), num(sup));
            r.kv(format!("{prefix}growth_exponent"), opt_num(growth_exponent));
        }
        ClassifyOutcome::FiniteBlowUp {
            radius,
            component,
            cell,
        } => {
            r.kv(format!("{prefix}blowup_radius"), num(radius));
            r.kv(format!("{prefix}component"), component);
            r.kv(format!("{prefix}radius_cell"), num(cell));
        }
        ClassifyOutcome::Undetermined { reason } => {
            r.kv(format!("{prefix}reason"), reason);
        }
    }
}

/// Blow-up radius of an outcome as a CSV cell.
pub fn r_est(o: &ClassifyOutcome) -> String {
    opt_num(o.blowup_radius())
}
