//! Command-line front end for `tsw-core`: TSW traces and parameter sweeps
//! written as CSV, TSW of assemblages stored as JSON, and a verification
//! suite.
//!
//! Exit codes: 0 on success, 1 for configuration or input errors, 2 for
//! numerical failures, 3 when verification fails.

// NaN must fail range checks, so `!(x >= 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod io;
pub mod run;
pub mod verify;

use std::io::Write;

pub use config::{Cli, RunConfig};
pub use error::{CliError, Result};

/// Resolves `cli` and runs the selected command.
pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::from_cli(cli)?;
    match cfg.command {
        config::CommandKind::Trace => run::run_trace(&cfg, stdout, stderr),
        config::CommandKind::Sweep => run::run_sweep(&cfg, stdout, stderr),
        config::CommandKind::Steer => run::run_steer(&cfg, stdout),
        config::CommandKind::Verify => verify::run_verify(&cfg, stdout),
    }
}
