//! `gallagher`: batch runner for the mean-square verification suites.
//!
//! Exit status: 0 when every asserted check passed, 1 when a check failed
//! (a JSON failure record goes to stderr), 2 for usage errors, 3 for I/O
//! errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use commands::{PlancherelParams, SelbergParams, SieveParams, SweepParams, VerifyParams};
use config::Common;

#[derive(Debug, Parser)]
#[command(
    name = "gallagher",
    version,
    about = "Mean-square inequality verification runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check one inequality on seeded random instances.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: VerifyParams,
    },
    /// Largest observed ratio over a parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: SweepParams,
    },
    /// Plain and modified Selberg integrals of an arithmetic function.
    Selberg {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: SelbergParams,
    },
    /// Tabulate d_k, the Möbius function, or the constant 1.
    Sieve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: SieveParams,
    },
    /// Audit the Plancherel identity for the Cesàro window.
    Plancherel {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: PlancherelParams,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    /// A check or computation failed; the record is printed to stderr.
    Failed(Value),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<gallagher_core::Error> for CliError {
    fn from(e: gallagher_core::Error) -> Self {
        use gallagher_core::Error as E;
        match e {
            E::InvalidParameter { name, reason } => config::bad(name, reason),
            E::RangeNotCovered { .. } | E::Overflow { .. } | E::RankDeficient { .. } => {
                CliError::Usage(e.to_string())
            }
            E::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Failed(serde_json::json!({
                "status": "error",
                "message": other.to_string(),
            })),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GALLAGHER_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        config::bad(
            "GALLAGHER_THREADS",
            format!("expected a non-negative integer, got `{raw}`"),
        )
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {n} threads: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (resolved, outcome) = match cli.command {
        Command::Verify { common, params } => {
            let (r, p) = config::resolve("verify", &common, &params)?;
            let o = commands::verify(p, r.seed)?;
            (r, o)
        }
        Command::Sweep { common, params } => {
            let (r, p) = config::resolve("sweep", &common, &params)?;
            let o = commands::sweep(p, r.seed)?;
            (r, o)
        }
        Command::Selberg { common, params } => {
            let (r, p) = config::resolve("selberg", &common, &params)?;
            let o = commands::selberg(p, r.seed)?;
            (r, o)
        }
        Command::Sieve { common, params } => {
            let (r, p) = config::resolve("sieve", &common, &params)?;
            let o = commands::sieve(p, r.seed)?;
            (r, o)
        }
        Command::Plancherel { common, params } => {
            let (r, p) = config::resolve("plancherel", &common, &params)?;
            let o = commands::plancherel(p, r.seed)?;
            (r, o)
        }
    };

    let bytes = outcome.render(resolved.format)?;
    match &resolved.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))?;
        }
    }
    match outcome.failure {
        Some(record) => Err(CliError::Failed(record)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => {
                    eprintln!("error: {msg}\n\nFor more information, try '--help'.")
                }
                CliError::Io(msg) => eprintln!("error: {msg}"),
                CliError::Failed(record) => eprintln!("{record}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
