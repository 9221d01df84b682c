//! Command-line scenario runner.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 for a bad
//! configuration or command line, 3 when a computation fails.

pub mod config;
pub mod output;
pub mod scenarios;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

pub use config::{ConfigError, OutputFormat, RunConfig};
pub use output::{Cell, Check, ScenarioResult, Severity, Table};
pub use scenarios::{Scenario, StepError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ab-solenoid",
    version,
    about = "Aharonov-Bohm solenoid verification scenarios"
)]
pub struct Args {
    /// Config file of `section.key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.path`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `output.format`.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    pub format: Option<String>,
    /// Seed for the randomized samples; overrides `run.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Count failed warnings as failures.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// A and B profiles, far field and return flux.
    Field,
    /// Aharonov-Bohm phase over several loops and gauges.
    Phase,
    /// Transverse/longitudinal decomposition residuals.
    Helmholtz,
    /// Path-dependent gauge-invariant potential reports.
    Dewitt,
    /// OAM ledger and the phase relation.
    Oam,
    /// Boundary terms against the outer radius.
    Surface,
    /// Charge at rest while the flux ramps up.
    Ramp,
    /// Radial approach to a finite solenoid.
    Approach,
    /// Long-solenoid limit of the approach.
    Sweep,
    /// Bessel checks, the alpha exponent and eigenmodes.
    Quantum,
    /// Every scenario (the default).
    All,
}

impl Command {
    pub fn scenarios(self) -> Vec<Scenario> {
        match self {
            Command::Field => vec![Scenario::Field],
            Command::Phase => vec![Scenario::Phase],
            Command::Helmholtz => vec![Scenario::Helmholtz],
            Command::Dewitt => vec![Scenario::Dewitt],
            Command::Oam => vec![Scenario::Oam],
            Command::Surface => vec![Scenario::Surface],
            Command::Ramp => vec![Scenario::Ramp],
            Command::Approach => vec![Scenario::Approach],
            Command::Sweep => vec![Scenario::Sweep],
            Command::Quantum => vec![Scenario::Quantum],
            Command::All => Scenario::ALL.to_vec(),
        }
    }
}

/// Reads the config file (if any) and applies command-line overrides.
pub fn resolve_config(args: &Args) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| ConfigError::Io {
                path: p.display().to_string(),
                reason: e.to_string(),
            })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &args.out {
        cfg.output.path = out.display().to_string();
    }
    if let Some(f) = &args.format {
        cfg.output.format = f.parse().map_err(ConfigError::Invalid)?;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs the selected scenarios (in parallel, reported in a fixed order),
/// writes their files and returns the exit status.
pub fn run(args: &Args) -> i32 {
    let cfg = match resolve_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let dir = PathBuf::from(&cfg.output.path);
    if let Err(e) = fs::create_dir_all(&dir) {
        eprintln!("error: cannot create output directory {}: {e}", dir.display());
        return EXIT_NUMERICAL;
    }
    let selected = args.command.unwrap_or(Command::All).scenarios();
    let results: Vec<_> = selected.par_iter().map(|s| (*s, s.run(&cfg))).collect();

    let mut status = EXIT_OK;
    for (scenario, outcome) in results {
        let res = match outcome {
            Ok(r) => r,
            Err(e) => {
                eprintln!("{}: numerical failure in {e}", scenario.name());
                status = EXIT_NUMERICAL;
                continue;
            }
        };
        let written = match cfg.output.format {
            OutputFormat::Csv => output::write_csv(&dir, &res, cfg.output.precision).map(|_| ()),
            OutputFormat::Json => output::write_json(&dir, &res).map(|_| ()),
        };
        if let Err(e) = written {
            eprintln!("{}: cannot write results: {e}", scenario.name());
            status = EXIT_NUMERICAL;
            continue;
        }
        let failed: Vec<&Check> = res.checks.iter().filter(|c| c.fails(args.strict)).collect();
        println!(
            "{:<10} {}/{} checks passed ({:.2} s)",
            res.scenario,
            res.checks.len() - failed.len(),
            res.checks.len(),
            res.wall_clock_s
        );
        for c in &failed {
            println!(
                "  FAIL {}: value {:e}, reference {:e}, tolerance {:e}",
                c.name, c.value, c.reference, c.tolerance
            );
        }
        if !failed.is_empty() && status == EXIT_OK {
            status = EXIT_CHECK_FAILED;
        }
    }
    status
}
