mod campaign;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use campaign::{DecoderArgs, SimulateArgs};

#[derive(Parser)]
#[command(
    name = "ldpc-osd",
    version,
    about = "LDPC iterative decoding cascaded with ordered statistics decoding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo campaign over an Eb/N0 grid.
    Simulate(SimulateArgs),
    /// Decode one received vector and print a diagnostic trace.
    DecodeOne(DecodeOneArgs),
    /// Print code dimensions, rank and degree profiles.
    CodeInfo(CodeInfoArgs),
}

#[derive(Args)]
pub struct DecodeOneArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// Whitespace-separated channel outputs y.
    #[arg(long = "y")]
    pub y: PathBuf,
    /// Noise variance for the BP variants.
    #[arg(long, conflicts_with = "ebn0")]
    pub sigma2: Option<f64>,
    /// Derive the noise variance from Eb/N0 (dB) and the code rate.
    #[arg(long)]
    pub ebn0: Option<f64>,
    #[command(flatten)]
    pub decoder: DecoderArgs,
}

#[derive(Args)]
pub struct CodeInfoArgs {
    #[arg(long)]
    pub code: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(&args),
        Command::DecodeOne(args) => commands::decode_one(&args),
        Command::CodeInfo(args) => commands::code_info(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
