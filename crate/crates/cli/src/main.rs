use std::path::PathBuf;

use clap::{Parser, Subcommand};

use choquard_cli::{execute, Command};

#[derive(Parser)]
#[command(name = "choquard", version, about = "Critical Choquard problem on a pierced ball")]
struct Cli {
    /// key=value config file; defaults apply to omitted keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Sub,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Exponents and sharp constants
    Constants,
    /// Bubble profile, its projection and the limit-equation residual
    Bubble,
    /// Robin function of the unit ball
    Robin,
    /// Reduced energy landscape
    ReducedEnergy,
    /// Critical point of the reduced energy and its Hessian
    CriticalPoint,
    /// Continuation compared against the energy expansion
    VerifyExpansion,
    /// One Newton solve at `eps`
    Solve,
    /// Newton continuation along `eps_schedule`
    Continuation,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Constants => Command::Constants,
            Sub::Bubble => Command::Bubble,
            Sub::Robin => Command::Robin,
            Sub::ReducedEnergy => Command::ReducedEnergy,
            Sub::CriticalPoint => Command::CriticalPoint,
            Sub::VerifyExpansion => Command::VerifyExpansion,
            Sub::Solve => Command::Solve,
            Sub::Continuation => Command::Continuation,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = execute(cli.cmd.into(), cli.config.as_deref(), &cli.out);
    std::process::exit(code as i32);
}
