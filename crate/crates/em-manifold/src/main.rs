use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use em_manifold::{run, Command, Variant};

/// Array manifolds, fields, power density and beamforming for
/// dipole-discretized antenna arrays.
#[derive(Parser)]
#[command(name = "em-manifold", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value = "near")]
    variant: Variant,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, &cli.config, cli.variant, cli.out.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("em-manifold: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
