use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use epicurve_cli::config::OUTPUT_DIR_ENV;
use epicurve_cli::{run, Cli, CliError, FileConfig, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("epicurve: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let config = RunConfig::resolve(cli, &file, env_dir)?;
    let outcome = run(&config)?;
    Ok(format!("{}wrote {} files to {}\n", outcome.summary, outcome.artifacts.len() + 1, config.output_dir.display()))
}
