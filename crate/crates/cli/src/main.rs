//! `casimir-lab`: spectral sums, continuum integrals, renormalisation and the
//! momentum budget from the command line.

mod commands;
mod config;
mod report;
mod verify;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;
use serde_json::Value;

use config::{Cli, RunConfig, ValidationError};
use report::{render, ReportEnvelope, ARTIFACT_VERSION};

fn resolve(cli: Cli) -> Result<RunConfig> {
    match cli.config_load {
        Some(path) => {
            if cli.command.is_some() {
                return Err(ValidationError("--config-load cannot be combined with a subcommand".into()).into());
            }
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        }
        None => {
            let Some(command) = cli.command else {
                return Err(ValidationError("a subcommand is required (see --help)".into()).into());
            };
            Ok(RunConfig {
                command,
                format: cli.format,
                output: cli.output,
                timing: cli.timing,
            })
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let dump = cli.config_dump;
    let cfg = resolve(cli)?;
    cfg.command.validate()?;
    if dump {
        println!("{}", serde_json::to_string_pretty(&cfg)?);
        return Ok(true);
    }

    let start = Instant::now();
    let outcome = commands::execute(&cfg.command)?;
    let timing = cfg.timing.then(|| start.elapsed().as_secs_f64());

    let report = ReportEnvelope {
        artifact_version: ARTIFACT_VERSION.into(),
        config_echo: cfg.clone(),
        results: Value::Object(outcome.results),
        provenance: outcome.provenance,
        timing,
        rows: outcome.rows,
    };
    let text = render(&report, cfg.format)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if !outcome.success && !matches!(cfg.command, config::Command::Verify(_)) {
        bail!("command reported failure");
    }
    Ok(outcome.success)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(u8::try_from(code).unwrap_or(2));
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ValidationError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
