use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use szego_cli::output::write_outputs;
use szego_cli::{execute, parse_spec, tolerances_from_overrides, CliError, Command, RunManifest};

/// Orthogonal matrix polynomials on [-2, 2]: recurrences, outer factors, limit functions and sum rules.
#[derive(Debug, Parser)]
#[command(name = "szego", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for the JSON record and CSV tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance overrides as a JSON object, e.g. '{"fact": 1e-7}'.
    #[arg(long, global = true, env = "SZEGO_TOLERANCES")]
    tolerances: Option<String>,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli.command.spec_path();
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let spec = parse_spec(&text)?;
    let tol = tolerances_from_overrides(cli.tolerances.as_deref())?;
    let report = execute(&cli.command, &spec, &tol)?;
    for line in &report.summary {
        println!("{line}");
    }
    if let Some(dir) = &cli.out {
        let manifest = RunManifest::new(&cli.command, &spec, cli.tolerances.as_deref());
        for p in write_outputs(dir, cli.command.name(), &manifest, &report)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("szego: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
