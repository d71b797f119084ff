//! Command-line front end: config parsing, the subcommands and the writer
//! that turns their outputs into files and an exit code.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use std::fs;
use std::path::Path;

pub use commands::{run_command, validate_for, Command, Output, Status};
pub use config::{parse_config, ConfigError, RunConfig};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    /// A computation failed; whatever was produced was still written.
    Computation = 1,
    /// Bad config; nothing written.
    Config = 2,
}

/// Reads the config (defaults when `path` is `None`) and validates it for `cmd`.
pub fn load(cmd: Command, path: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let cfg = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| ConfigError::Io(format!("{}: {e}", p.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    validate_for(cmd, &cfg)?;
    Ok(cfg)
}

fn write_all(out: &Output, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, bytes) in &out.files {
        fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}

/// Full run: load, compute, write. Messages go to stdout and stderr.
pub fn execute(cmd: Command, config: Option<&Path>, out_dir: &Path) -> ExitCode {
    let cfg = match load(cmd, config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::Config;
        }
    };
    let (out, status) = run_command(cmd, &cfg);
    for l in &out.stdout {
        println!("{l}");
    }
    if let Err(e) = write_all(&out, out_dir) {
        eprintln!("cannot write to {}: {e}", out_dir.display());
        return ExitCode::Computation;
    }
    match status {
        Status::Success => ExitCode::Success,
        Status::NotConverged(m) | Status::Failed(m) => {
            eprintln!("{}: {m}", cmd.name());
            ExitCode::Computation
        }
    }
}
