//! Command-line workflows over `pumpsim-core`: scenario files in, CSV and
//! `key=value` summaries out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod workflows;

use std::path::PathBuf;

use clap::Parser;

use pumpsim_core::atomic::Sublevel;

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::output::{OutputDir, Report};
use crate::workflows::{default_registry, RunContext};

#[derive(Debug, Parser)]
#[command(
    name = "pumpsim",
    version,
    about = "Optical pumping, Raman spectra and recoil heating of cold cesium"
)]
pub struct Cli {
    /// One of: states, pump, spectrum, heat, fit.
    pub command: String,
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `[output] directory`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Monte Carlo seed; overrides `[mc] seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Use the reduced equation set at the default threshold.
    #[arg(long)]
    pub prune: bool,
    /// Observation file for `fit`, as `M=FILE` (F=4 sublevel m) or `LABEL=FILE`.
    #[arg(long, value_name = "M=FILE")]
    pub data: Vec<String>,
    /// Also write the branching-ratio table (`states`).
    #[arg(long)]
    pub branching: bool,
}

fn parse_data(spec: &str) -> CliResult<(Sublevel, PathBuf)> {
    let (level, file) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--data expects M=FILE, got `{spec}`")))?;
    let level = match level.parse::<i32>() {
        Ok(m) => Sublevel::ground(4, m),
        Err(_) => level
            .parse()
            .map_err(|e| CliError::Config(format!("--data `{spec}`: {e}")))?,
    };
    level
        .try_index()
        .map_err(|e| CliError::Config(format!("--data `{spec}`: {e}")))?;
    Ok((level, PathBuf::from(file)))
}

/// Execute one command and return its summary.
pub fn run(cli: &Cli) -> CliResult<Report> {
    let registry = default_registry();
    let workflow = registry.get(&cli.command).ok_or_else(|| {
        CliError::Config(format!(
            "unknown command `{}`; expected one of {}",
            cli.command,
            registry.names().join(", ")
        ))
    })?;
    let config = cli
        .config
        .as_deref()
        .map(ScenarioConfig::load)
        .transpose()?;
    if workflow.needs_config() && config.is_none() {
        return Err(CliError::Config(format!(
            "`{}` needs --config",
            workflow.name()
        )));
    }
    let out_dir = cli
        .out
        .clone()
        .or_else(|| {
            config
                .as_ref()
                .and_then(|c| c.output.directory.as_ref().map(|d| c.resolve(d)))
        })
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = RunContext {
        config,
        out: OutputDir::create(&out_dir)?,
        seed: cli.seed,
        prune: cli.prune,
        data: cli
            .data
            .iter()
            .map(|d| parse_data(d))
            .collect::<CliResult<_>>()?,
        branching: cli.branching,
    };
    log::info!("running `{}` into {}", workflow.name(), out_dir.display());
    workflow.run(&ctx)
}
