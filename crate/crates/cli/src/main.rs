use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use leeyang_cli::config::{Cli, Command, CommandKind, RunConfig};
use leeyang_cli::error::CliError;
use leeyang_cli::run::{run_compare, run_density, run_exact, run_predict, Outcome};

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Exact(a) => run_exact(&RunConfig::resolve(CommandKind::Exact, &a)?),
        Command::Predict(a) => run_predict(&RunConfig::resolve(CommandKind::Predict, &a)?),
        Command::Density(a) => run_density(&RunConfig::resolve(CommandKind::Density, &a)?),
        Command::Compare(a) => run_compare(&a),
    }
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("LEEYANG_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Flag(format!(
            "LEEYANG_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Numeric(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = threads().and_then(|()| dispatch(cli));
    match result {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("{w}");
            }
            println!("{}", out.summary);
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
