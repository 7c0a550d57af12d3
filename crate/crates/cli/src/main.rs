//! `predictorlab`: finite predictor coefficients and long-memory experiments.

mod commands;
mod config;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use config::{Cli, CommandKind, Format, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Lib(predictorlab::Error),
}

impl From<predictorlab::Error> for CliError {
    fn from(e: predictorlab::Error) -> Self {
        Self::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> &'static str {
        use predictorlab::Error as E;
        match self {
            Self::Config(_) | Self::Lib(E::Argument(_)) | Self::Lib(E::Regime(_)) => "config",
            Self::Io(_) => "io",
            Self::Lib(E::ModelValidation(_)) => "model-validation",
            Self::Lib(E::Truncation { .. }) => "truncation",
            Self::Lib(E::NonConvergence { .. }) => "non-convergence",
            Self::Lib(E::Degeneracy { .. }) => "degeneracy",
            Self::Lib(E::OracleDisagreement { .. }) => "oracle-disagreement",
        }
    }

    fn exit_status(&self) -> u8 {
        match self.code() {
            "config" | "io" => 2,
            "model-validation" => 3,
            "oracle-disagreement" => 5,
            _ => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) | Self::Io(m) => f.write_str(m),
            Self::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PREDICTORLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("PREDICTORLAB_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (kind, flags) = cli.command.split();
    let cfg = RunConfig::resolve(kind, &flags)?;
    let report = match kind {
        CommandKind::Coeffs => commands::coeffs(&cfg)?,
        CommandKind::Predict => commands::predict(&cfg)?,
        CommandKind::Rate => commands::rate(&cfg)?,
        CommandKind::Baxter => commands::baxter(&cfg)?,
        CommandKind::Dkscale => commands::dkscale(&cfg)?,
    };
    let text = match cfg.format {
        Format::Csv => {
            if let Some(s2) = report.extra.get("sigma2") {
                eprintln!("sigma2={}", s2.as_f64().map_or("nan".into(), |v| format!("{v:.16e}")));
            }
            report.table.to_csv()
        }
        Format::Json => {
            let mut meta = cfg.meta(kind);
            if let Value::Object(m) = &mut meta {
                m.extend(report.extra.clone());
            }
            report.table.to_json(meta)
        }
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))?,
        None => print!("{text}"),
    }
    report.deferred_error.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_status())
        }
    }
}
