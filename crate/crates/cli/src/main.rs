use std::process::ExitCode;

use clap::Parser;

use blockra_cli::cli::Cli;
use blockra_cli::commands;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match commands::run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => println!("{text}"),
    }
    ExitCode::SUCCESS
}
