//! Problem specification files.
//!
//! A spec file is TOML with a dimension, the two weights `[p]`, `[q]` chosen
//! from named families, power-law nonlinearities `[f]`, `[g]`, an optional
//! `[envelope]` and optional `[solver]` overrides:
//!
//! ```toml
//! name = "power_2222"
//! dimension = 3
//!
//! [p]
//! family = "exponential"
//! c = 1.0
//! rate = 1.0
//!
//! [q]
//! family = "power"       # c·(1 + r²)^(−m)
//! c = 6.0
//! m = 2.0
//!
//! [f]
//! coef = 1.0
//! a = 2.0
//! b = 2.0
//!
//! [g]
//! coef = 1.0
//! a = 2.0
//! b = 2.0
//!
//! [envelope]             # h(w) = coef·w^exponent for s, t ≥ eta
//! coef = 0.25
//! exponent = 2.0
//! eta = 1.0
//!
//! [solver]
//! r_max = 60.0
//! spacing = 0.01
//! ```
//!
//! Weight families: `zero`, `constant` (`c`), `power` (`c`, `m`),
//! `exponential` (`c`, `rate`), `bump` (`c`, `radius`) and `quadratic`
//! (`c0`, `c2`, the weight `c0 + c2·r²`).

use std::path::Path;

use entire_core::digest::sha256_hex;
use entire_core::problem::{Envelope, NonlinearPair, Nonlinearity, ProblemSpec, ScalarMap, Weight};
use entire_core::SolverConfig;
use serde::Deserialize;

use crate::error::CliError;

/// The fixtures shipped with the binary, addressable by name.
pub const BUNDLED: [(&str, &str); 4] = [
    ("manufactured", include_str!("../specs/manufactured.spec")),
    ("power_2222", include_str!("../specs/power_2222.spec")),
    ("scalar_blowup", include_str!("../specs/scalar_blowup.spec")),
    ("sublinear", include_str!("../specs/sublinear.spec")),
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    name: Option<String>,
    dimension: u32,
    p: WeightEntry,
    q: WeightEntry,
    f: PowerEntry,
    g: PowerEntry,
    envelope: Option<EnvelopeEntry>,
    #[serde(default)]
    solver: SolverEntry,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum WeightEntry {
    Zero,
    Constant { c: f64 },
    Power { c: f64, m: f64 },
    Exponential { c: f64, rate: f64 },
    Bump { c: f64, radius: f64 },
    Quadratic { c0: f64, c2: f64 },
}

impl WeightEntry {
    fn build(&self) -> Weight {
        match *self {
            WeightEntry::Zero => Weight::zero(),
            WeightEntry::Constant { c } => Weight::constant(c),
            WeightEntry::Power { c, m } => Weight::power(c, m),
            WeightEntry::Exponential { c, rate } => Weight::exponential(c, rate),
            WeightEntry::Bump { c, radius } => Weight::bump(c, radius),
            WeightEntry::Quadratic { c0, c2 } => Weight::quadratic(c0, c2),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerEntry {
    coef: f64,
    a: f64,
    b: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvelopeEntry {
    coef: f64,
    exponent: f64,
    eta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverEntry {
    r_max: Option<f64>,
    spacing: Option<f64>,
    tol: Option<f64>,
    k_max: Option<usize>,
    threshold: Option<f64>,
    band_low: Option<f64>,
    clamp: Option<f64>,
}

/// A parsed specification together with its solver defaults.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub name: String,
    pub spec: ProblemSpec,
    pub solver: SolverConfig,
    /// SHA-256 of the file text.
    pub digest: String,
}

pub fn parse(text: &str, fallback_name: &str) -> Result<LoadedSpec, CliError> {
    let file: SpecFile = toml::from_str(text).map_err(|e| CliError::BadArgs(format!("spec file: {e}")))?;
    let check = |what: &str, values: &[f64]| {
        if values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(CliError::BadArgs(format!("spec file: non-finite parameter in {what}")))
        }
    };
    check("f", &[file.f.coef, file.f.a, file.f.b])?;
    check("g", &[file.g.coef, file.g.a, file.g.b])?;
    let mut nonlin = NonlinearPair::new(
        Nonlinearity::power(file.f.coef, file.f.a, file.f.b),
        Nonlinearity::power(file.g.coef, file.g.a, file.g.b),
    );
    if let Some(env) = &file.envelope {
        check("envelope", &[env.coef, env.exponent, env.eta.unwrap_or(1.0)])?;
        nonlin = nonlin.with_envelope(Envelope::new(ScalarMap::power(env.coef, env.exponent), env.eta));
    }
    let spec = ProblemSpec::new(file.dimension, file.p.build(), file.q.build(), nonlin).map_err(CliError::from)?;
    let d = SolverConfig::default();
    let s = &file.solver;
    let solver = SolverConfig {
        r_max: s.r_max.unwrap_or(d.r_max),
        spacing: s.spacing.unwrap_or(d.spacing),
        tol_fixed_point: s.tol.unwrap_or(d.tol_fixed_point),
        k_max: s.k_max.unwrap_or(d.k_max),
        blowup_threshold: s.threshold.unwrap_or(d.blowup_threshold),
        band_low: s.band_low.unwrap_or(d.band_low),
        clamp: s.clamp.unwrap_or(d.clamp),
        ..d
    };
    solver
        .validate()
        .map_err(|e| CliError::BadArgs(format!("spec file [solver]: {e}")))?;
    Ok(LoadedSpec {
        name: file.name.unwrap_or_else(|| fallback_name.to_string()),
        spec,
        solver,
        digest: sha256_hex(text.as_bytes()),
    })
}

/// Loads `arg` as a file path, or failing that as the name of a bundled spec
/// (with or without the `.spec` suffix).
pub fn load(arg: &str) -> Result<LoadedSpec, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::BadArgs(format!("cannot read {arg}: {e}")))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("spec");
        return parse(&text, stem);
    }
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or(arg);
    let name = name.strip_suffix(".spec").unwrap_or(name);
    match bundled(name) {
        Some(text) => parse(text, name),
        None => Err(CliError::BadArgs(format!(
            "no spec file at {arg} and no bundled spec named {name} (bundled: {})",
            BUNDLED.map(|(n, _)| n).join(", ")
        ))),
    }
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_specs_parse() {
        for (name, text) in BUNDLED {
            let s = parse(text, "x").unwrap();
            assert_eq!(s.name, name);
            assert_eq!(s.spec.n, 3);
        }
        let m = load("manufactured.spec").unwrap();
        assert_eq!(m.solver.r_max, 10.0);
        assert_eq!(m.solver.spacing, 1e-3);
        assert!((m.spec.p.eval(1.0) - 1.5).abs() < 1e-15);
        let p = load("power_2222").unwrap();
        assert_eq!(p.solver, SolverConfig::default());
        assert_eq!(p.spec.nonlin.power_exponents(), Some((2.0, 2.0, 2.0, 2.0)));
        assert_eq!(p.spec.nonlin.explicit_envelope().unwrap().eta, 1.0);
    }

    #[test]
    fn malformed_files_are_bad_arguments() {
        let base = include_str!("../specs/sublinear.spec");
        for bad in [
            base.replace("dimension = 3", "dimension = 2"),
            base.replace("exponential", "gaussian"),
            base.replace("rate = 1.0", "rate = 1.0\nextra = 2"),
            base.replace("[g]\ncoef = 1.0\n", "[g]\n"),
            format!("{base}\n[solver]\nspacing = -1.0\n"),
        ] {
            assert!(matches!(parse(&bad, "x"), Err(CliError::BadArgs(_))), "{bad}");
        }
        assert!(matches!(load("no_such_spec"), Err(CliError::BadArgs(_))));
    }

    #[test]
    fn files_on_disk_take_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mine.spec");
        let text = include_str!("../specs/sublinear.spec").replace("name = \"sublinear\"\n", "");
        std::fs::write(&path, &text).unwrap();
        let s = load(path.to_str().unwrap()).unwrap();
        assert_eq!(s.name, "mine");
        assert_eq!(s.digest, sha256_hex(text.as_bytes()));
    }
}
