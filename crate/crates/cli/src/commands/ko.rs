use entire_core::ko::ko_report;
use entire_core::IntegralVerdict;

use crate::error::CliError;
use crate::output::{num, Report};
use crate::Context;

/// `name.verdict`, `name.value`, `name.error` (or the partial sum and probe
/// radius of a divergent integral).
pub fn verdict_lines(r: &mut Report, name: &str, v: &IntegralVerdict) {
    match *v {
        IntegralVerdict::Finite { value, error } => {
            r.kv(format!("{name}.verdict"), "finite")
                .kv(format!("{name}.value"), num(value))
                .kv(format!("{name}.error"), num(error));
        }
        IntegralVerdict::Infinite { partial, probed_to } => {
            r.kv(format!("{name}.verdict"), "infinite")
                .kv(format!("{name}.partial"), num(partial))
                .kv(format!("{name}.probed_to"), num(probed_to));
        }
    }
}

pub fn ko(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let (loaded, _) = ctx.load_spec(None)?;
    let nl = &loaded.spec.nonlin;
    let rep = ko_report(nl)?;
    let mut r = Report::new();
    r.kv("spec", &loaded.name).kv("nonlinearity", nl.describe());
    match (nl.envelope(), &rep.h_env) {
        (Some(env), Some(h)) => {
            r.kv("envelope", env.h.label()).num("envelope.eta", env.eta);
            verdict_lines(&mut r, "H_env", h);
        }
        _ => {
            r.kv("envelope", "none");
        }
    }
    verdict_lines(&mut r, "F_inf", &rep.f_inf);
    verdict_lines(&mut r, "G_inf", &rep.g_inf);
    r.kv(
        "both_components_diverge_expected",
        if rep.both_diagonals_finite() { "yes" } else { "no" },
    );
    ctx.emit("ko.txt", &r)
}
