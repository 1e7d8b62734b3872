//! `barstress`: EEG ratio analysis from the command line.
//!
//! Exit codes: 0 success, 2 validation or user error, 3 I/O error,
//! 4 a fit did not converge (its output is still written).

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::commands::Output;
use crate::config::{parse_override, Format, ModelChoice, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "barstress", version, about = "Rhythm power ratio analysis of EEG recordings")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (config key `out`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Output kinds to write (config key `format`).
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    format: Vec<Format>,
    /// Seed for synthesis (config key `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// No summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    /// Override any config key, e.g. `--set welch.window_len=5`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Welch spectrum of one analysis window, one CSV per channel.
    Psd {
        /// Recording (.csv or .edf); config key `input`.
        input: Option<PathBuf>,
        /// Window start in seconds; config key `psd.at`.
        #[arg(long)]
        at: Option<f64>,
    },
    /// Ratio series over the protocol epochs.
    Bar {
        input: Option<PathBuf>,
    },
    /// Fit 4PL and/or quartic curves to `x,y` points.
    Fit {
        /// Points CSV; config key `fit.points`.
        points: Option<PathBuf>,
        /// Config key `fit.model`.
        #[arg(long, value_enum)]
        model: Option<ModelChoice>,
    },
    /// Scalp maps per epoch and their pairwise similarity.
    Topo {
        input: Option<PathBuf>,
        /// `bar` or `band:<name>`; config key `topo.scalar`.
        #[arg(long)]
        scalar: Option<String>,
    },
    /// Generate a synthetic recording from a JSON spec.
    Synth {
        /// Config key `synth.spec`.
        spec: Option<PathBuf>,
    },
    /// Collect bar/fit/topo outputs in the output directory into one report.
    Report,
}

fn path_value(p: &std::path::Path) -> Value {
    Value::String(p.to_string_lossy().into_owned())
}

fn overrides(cli: &Cli) -> Result<Vec<(String, Value)>, CliError> {
    let mut out = cli.set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>()?;
    let mut push = |key: &str, v: Value| out.push((key.to_string(), v));
    match &cli.command {
        Command::Psd { input, at } => {
            if let Some(p) = input.as_deref() {
                push("input", path_value(p));
            }
            if let Some(t) = at {
                push("psd.at", json!(t));
            }
        }
        Command::Bar { input } => {
            if let Some(p) = input.as_deref() {
                push("input", path_value(p));
            }
        }
        Command::Fit { points, model } => {
            if let Some(p) = points.as_deref() {
                push("fit.points", path_value(p));
            }
            if let Some(m) = model {
                push("fit.model", json!(m));
            }
        }
        Command::Topo { input, scalar } => {
            if let Some(p) = input.as_deref() {
                push("input", path_value(p));
            }
            if let Some(s) = scalar.as_ref() {
                push("topo.scalar", json!(s));
            }
        }
        Command::Synth { spec } => {
            if let Some(p) = spec.as_deref() {
                push("synth.spec", path_value(p));
            }
        }
        Command::Report => {}
    }
    if let Some(dir) = &cli.out {
        push("out", path_value(dir));
    }
    if !cli.format.is_empty() {
        push("format", json!(cli.format));
    }
    if let Some(seed) = cli.seed {
        push("seed", json!(seed));
    }
    if cli.quiet {
        push("quiet", json!(true));
    }
    Ok(out)
}

fn write_outputs(cfg: &RunConfig, output: &Output) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    for (name, bytes) in &output.files {
        let path = cfg.out.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(RunConfig, Output), CliError> {
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides(cli)?)?;
    let output = match cli.command {
        Command::Psd { .. } => commands::psd(&cfg)?,
        Command::Bar { .. } => commands::bar(&cfg)?,
        Command::Fit { .. } => commands::fit(&cfg)?,
        Command::Topo { .. } => commands::topo(&cfg)?,
        Command::Synth { .. } => commands::synth(&cfg)?,
        Command::Report => commands::report(&cfg)?,
    };
    write_outputs(&cfg, &output)?;
    Ok((cfg, output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((cfg, output)) => {
            if !cfg.quiet {
                for m in &output.messages {
                    println!("{m}");
                }
            }
            if output.non_converged {
                eprintln!("barstress: a fit did not converge; results written with a warning");
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("barstress: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
