//! Command-line driver for `entire-core`.
//!
//! Every subcommand writes its tables and reports into `--out` and finishes
//! with a `<subcommand>.manifest.json` listing each output with its SHA-256.
//! Tables and reports are byte-identical across runs and worker counts; only
//! the manifest records wall-clock time.
//!
//! Exit statuses are listed in [`error::exit`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Instant, SystemTime};

use clap::{Args, Parser, Subcommand, ValueEnum};
use entire_core::digest::sha256_hex;
use entire_core::SolverConfig;

pub mod commands;
pub mod error;
pub mod output;
pub mod pool;
pub mod specfile;

use error::{exit, CliError};
use output::{OutputDir, Report, RunManifest};
use specfile::LoadedSpec;

#[derive(Debug, Parser)]
#[command(
    name = "entire",
    version,
    about = "Radial entire solutions of competitive elliptic systems"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Spec file path, or the name of a bundled spec.
    #[arg(long, global = true)]
    pub spec: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Largest grid radius.
    #[arg(long, global = true)]
    pub rmax: Option<f64>,
    /// Relative tolerance of the fixed-point iteration.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Blow-up threshold on u and v.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Seed for sampling in property checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Solve from central values and write the sampled solution.
    Solve(Central),
    /// Classify central values as entire, blowing up, or undetermined.
    Classify(Central),
    /// Classify a raster of central values and locate the edge along rays.
    Region(RegionArgs),
    /// Keller-Osserman integrals of the spec's nonlinearities.
    Ko,
    /// Check hypotheses, or a solution table written by `solve`.
    Verify(VerifyArgs),
    /// Regenerate a bundled experiment.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Central {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    /// `a0,a1,b0,b1`.
    #[arg(long = "box")]
    pub bounds: String,
    /// `NxM` raster nodes along alpha and beta.
    #[arg(long, default_value = "64x64")]
    pub res: String,
    /// Truncation level (default: 0.05 times the shorter box edge).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Rays for edge extraction.
    #[arg(long, default_value_t = entire_core::region::DEFAULT_RAYS)]
    pub rays: usize,
    /// Bracket width of each edge point.
    #[arg(long, default_value_t = 1e-2)]
    pub edge_tol: f64,
    /// Dominance pairs drawn for the closure check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum What {
    Hypotheses,
    LowerBound,
    Divergence,
    Residual,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub what: What,
    /// Solution CSV (`r,u,v`) from `solve`; required except for hypotheses.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Smallest radius considered by the lower-bound and residual checks.
    #[arg(long)]
    pub from: Option<f64>,
    /// Allowed negative lower-bound margin.
    #[arg(long, default_value_t = 1e-3)]
    pub slack: f64,
    /// Largest accepted residual.
    #[arg(long, default_value_t = 1e-3)]
    pub residual_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Figure1,
    Theorem3,
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Solve(_) => "solve".into(),
            Command::Classify(_) => "classify".into(),
            Command::Region(_) => "region".into(),
            Command::Ko => "ko".into(),
            Command::Verify(a) => format!("verify-{}", a.what.to_possible_value().unwrap().get_name()),
            Command::Reproduce { target } => format!("reproduce-{}", target.to_possible_value().unwrap().get_name()),
        }
    }
}

/// State shared by the subcommands of one run.
pub struct Context<'a> {
    pub common: Common,
    pub out: OutputDir,
    pub stdout: &'a mut dyn Write,
    pub spec_name: Option<String>,
    pub spec_digest: Option<String>,
    pub config_digest: Option<String>,
}

impl Context<'_> {
    /// Loads `--spec` (or `default`) and applies the command-line solver
    /// overrides.
    pub fn load_spec(&mut self, default: Option<&str>) -> Result<(LoadedSpec, SolverConfig), CliError> {
        let arg = match (&self.common.spec, default) {
            (Some(s), _) => s.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(CliError::BadArgs("--spec is required".into())),
        };
        let loaded = specfile::load(&arg)?;
        let mut cfg = loaded.solver;
        if let Some(r) = self.common.rmax {
            cfg.r_max = r;
        }
        if let Some(t) = self.common.tol {
            cfg.tol_fixed_point = t;
        }
        if let Some(t) = self.common.threshold {
            cfg.blowup_threshold = t;
            cfg.band_low = cfg.band_low.min(t / 100.0);
        }
        cfg.validate().map_err(|e| CliError::BadArgs(e.to_string()))?;
        self.spec_name = Some(loaded.name.clone());
        self.spec_digest = Some(loaded.digest.clone());
        self.config_digest = Some(sha256_hex(cfg.describe().as_bytes()));
        Ok((loaded, cfg))
    }

    /// Writes `report` to `name` in the output directory and echoes it.
    pub fn emit(&mut self, name: &str, report: &Report) -> Result<(), CliError> {
        let text = report.render();
        self.out.write(name, text.as_bytes())?;
        self.stdout.write_all(text.as_bytes())?;
        Ok(())
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit status. Reports go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::BAD_ARGS } else { exit::OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    let started = SystemTime::now();
    let clock = Instant::now();
    let out = match OutputDir::create(&cli.common.out) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let mut ctx = Context {
        common: cli.common.clone(),
        out,
        stdout,
        spec_name: None,
        spec_digest: None,
        config_digest: None,
    };
    let code = match commands::dispatch(&cli.command, &mut ctx) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    };
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        subcommand: cli.command.name(),
        arguments: args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
        spec_name: ctx.spec_name,
        spec_digest: ctx.spec_digest,
        config_digest: ctx.config_digest,
        exit_code: code,
        outputs: ctx.out.files().to_vec(),
        timing: RunManifest::timing(started, clock.elapsed()),
    };
    let path = ctx.out.path().join(format!("{}.manifest.json", manifest.subcommand));
    if let Err(e) = std::fs::write(&path, manifest.to_json()) {
        let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
        if code == exit::OK {
            return exit::IO;
        }
    }
    code
}
