//! `robin-mc`: batch front end for the reflecting Brownian motion solver.
//!
//! Exit codes: 0 success, 1 runtime failure or a failed verify check,
//! 2 invalid config, unknown name or bad arguments.

mod artifact;
mod config;
mod run;
mod solve;
mod study;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use robin_core::verify::{suite, suite_names, SuiteOptions, SuiteReport};
use serde::Serialize;

use artifact::{out_path, write_json, VERSION};
use config::{config_err, runtime_err, CliError};

#[derive(Debug, Parser)]
#[command(name = "robin-mc", version = VERSION, about = "Monte Carlo solver for Robin boundary value problems")]
struct Cli {
    /// Run config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured estimators and their oracle.
    Solve,
    /// Run property suites (all of them when none are named).
    Verify {
        suites: Vec<String>,
        /// Path count for every check, replacing each suite's default.
        #[arg(long)]
        paths: Option<u64>,
    },
    /// Tabulate a parameter ladder: step-size, paths or mu-ladder.
    Study { kind: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config_err("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(runtime_err)?;
    }
    match cli.command {
        Command::Solve => {
            let r = config::load(need_config(&cli.config)?)?.resolve(cli.seed)?;
            solve::solve(&r, &cli.out)?;
            Ok(0)
        }
        Command::Study { kind } => {
            let kind = study::find(&kind)?;
            let r = config::load(need_config(&cli.config)?)?.resolve(cli.seed)?;
            study::study(kind, &r, &cli.out)?;
            Ok(0)
        }
        Command::Verify { suites, paths } => verify(&suites, cli.seed, paths, &cli.out),
    }
}

fn need_config(path: &Option<PathBuf>) -> Result<&Path, CliError> {
    path.as_deref()
        .ok_or_else(|| config_err("--config <file> is required"))
}

#[derive(Serialize)]
struct VerifyArtifact<'a> {
    version: &'static str,
    options: &'a SuiteOptions,
    report: &'a SuiteReport,
}

fn verify(
    names: &[String],
    seed: Option<u64>,
    paths: Option<u64>,
    out: &Path,
) -> Result<u8, CliError> {
    let selected = if names.is_empty() {
        suite_names()
            .into_iter()
            .map(|s| suite(s).expect("registered"))
            .collect()
    } else {
        names
            .iter()
            .map(|n| suite(n).map_err(config_err))
            .collect::<Result<Vec<_>, _>>()?
    };
    if paths.is_some_and(|n| n < 2) {
        return Err(config_err("--paths must be at least 2"));
    }
    let defaults = SuiteOptions::default();
    let opts = SuiteOptions {
        seed: seed.unwrap_or(defaults.seed),
        n_paths: paths,
    };
    let mut all_pass = true;
    for s in selected {
        let report = s.run(&opts).map_err(runtime_err)?;
        for c in &report.checks {
            println!(
                "{} {}: {}: observed {} reference {} tolerance {}",
                if c.pass { "PASS" } else { "FAIL" },
                s.name(),
                c.name,
                c.observed,
                c.reference,
                c.tolerance
            );
        }
        all_pass &= report.passed;
        let artifact = VerifyArtifact {
            version: VERSION,
            options: &opts,
            report: &report,
        };
        write_json(
            &out_path(out, &format!("verify-{}.json", s.name()))?,
            &artifact,
        )?;
    }
    Ok(if all_pass { 0 } else { 1 })
}
