//! `tdvpsim`: build benchmark circuits, run them through the TEBD and TDVP
//! engines, check both against the dense oracle, and collect benchmark data.
//!
//! Exit codes: 0 success, 1 tolerance violation or engine failure, 2 input
//! error, 3 resource abort.

mod bench;
mod options;
mod outputs;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use options::{BuilderArgs, CircuitSource, EngineArgs};

pub const MEM_CAP_ENV: &str = "TDVPSIM_MEM_CAP_MB";
pub const DEFAULT_MEM_CAP_MB: u64 = 8192;

#[derive(Debug)]
pub enum Failure {
    Tolerance(String),
    Input(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Tolerance(_) => 1,
            Failure::Input(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Tolerance(m) | Failure::Input(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<tdvpsim::Error> for Failure {
    fn from(e: tdvpsim::Error) -> Self {
        use tdvpsim::Error as E;
        match e {
            E::InvalidInput(_) | E::SiteOutOfRange { .. } | E::Gate(_) | E::Circuit(_) | E::Oversize { .. } | E::Io(_) | E::Json(_) => {
                Failure::Input(e.to_string())
            }
            E::CenterMisplaced { .. } | E::Convergence { .. } | E::NotUnitary { .. } => Failure::Tolerance(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Memory cap in bytes from the environment, or the default.
pub fn memory_cap_bytes() -> CliResult<u64> {
    let mb = match std::env::var(MEM_CAP_ENV) {
        Ok(v) => {
            v.trim().parse::<u64>().map_err(|_| Failure::Input(format!("{MEM_CAP_ENV} must be a whole number of megabytes, got '{v}'")))?
        }
        Err(_) => DEFAULT_MEM_CAP_MB,
    };
    Ok(mb.saturating_mul(1 << 20))
}

#[derive(Parser, Debug)]
#[command(name = "tdvpsim", version, about = "MPS circuit simulation with TEBD and local TDVP gate application")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a benchmark circuit and write it as JSON.
    Build {
        #[command(flatten)]
        builder: BuilderArgs,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a circuit through one or both engines and write metrics.
    Run {
        #[command(flatten)]
        source: CircuitSource,
        #[command(flatten)]
        engine: EngineArgs,
        /// Output directory for `<name>_<engine>.csv` and `<name>_<engine>.json`.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compare both engines with the dense oracle and check local/global
    /// projector agreement on random states.
    Verify(verify::VerifyArgs),
    /// Run both engines over several system sizes and write one aggregate CSV.
    Bench(bench::BenchArgs),
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Build { builder, out } => {
            let circuit = builder.build()?;
            let json = circuit.to_json()?;
            match out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => println!("{json}"),
            }
            Ok(())
        }
        Command::Run { source, engine, out } => outputs::cmd_run(&source, &engine, &out),
        Command::Verify(args) => verify::cmd_verify(&args),
        Command::Bench(args) => bench::cmd_bench(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
