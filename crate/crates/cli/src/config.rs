//! Flag and config-file handling.
//!
//! Every subcommand's parameters live in one struct that is both a clap
//! argument group and a serde record. A `--config` JSON object supplies
//! defaults; flags given on the command line override it. Unknown keys in
//! the file are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by all subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON file with default parameter values; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Output format. Defaults to csv for a `.csv` output path, json otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Base seed for all random instances [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileCommon {
    command: Option<String>,
    out: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
}

/// Resolved shared options.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

/// Reads the config file (if any) and merges it under the flags.
pub fn resolve<T: Serialize + DeserializeOwned>(
    command: &str,
    common: &Common,
    flags: &T,
) -> Result<(Resolved, T), CliError> {
    let mut file = match &common.config {
        Some(path) => read_config(path)?,
        None => Map::new(),
    };
    let mut shared = Map::new();
    for key in ["command", "out", "format", "seed"] {
        if let Some(v) = file.remove(key) {
            shared.insert(key.to_string(), v);
        }
    }
    let shared: FileCommon = serde_json::from_value(Value::Object(shared))
        .map_err(|e| CliError::Usage(format!("config: {e}")))?;
    if let Some(c) = &shared.command {
        if c != command {
            return Err(CliError::Usage(format!(
                "config: key `command` is `{c}` but the subcommand is `{command}`"
            )));
        }
    }

    let overlay = serde_json::to_value(flags).expect("flags serialise");
    if let Value::Object(map) = overlay {
        for (k, v) in map {
            if !v.is_null() {
                file.insert(k, v);
            }
        }
    }
    let params: T = serde_json::from_value(Value::Object(file))
        .map_err(|e| CliError::Usage(format!("config: {e}")))?;

    let out = common.out.clone().or(shared.out);
    let format = common.format.or(shared.format).unwrap_or_else(|| {
        match out.as_deref().and_then(Path::extension) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    });
    let seed = common.seed.or(shared.seed).unwrap_or(0);
    Ok((Resolved { out, format, seed }, params))
}

fn read_config(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Usage(format!(
            "config {}: expected a JSON object",
            path.display()
        ))),
        Err(e) => Err(CliError::Usage(format!("config {}: {e}", path.display()))),
    }
}

/// Usage error naming the offending key.
pub fn bad(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid value for `{key}`: {reason}"))
}

pub fn check_theta(key: &str, theta: f64) -> Result<(), CliError> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(bad(key, format!("must lie in (0, 1), got {theta}")))
    }
}

pub fn check_positive(key: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(bad(key, format!("must be positive and finite, got {x}")))
    }
}

pub fn check_above(key: &str, x: f64, lower: f64) -> Result<(), CliError> {
    if x > lower && x.is_finite() {
        Ok(())
    } else {
        Err(bad(key, format!("must be finite and > {lower}, got {x}")))
    }
}

pub fn check_count(key: &str, n: u64) -> Result<(), CliError> {
    if n >= 1 {
        Ok(())
    } else {
        Err(bad(key, "must be at least 1"))
    }
}
