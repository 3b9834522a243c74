use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use trolab_cli::{run, Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let json = outcome.report.to_json();
    // for `generate`, --out names the map file and the report goes to stdout
    let target = match cli.command {
        Command::Generate { .. } => None,
        _ => cli.global.out.as_ref(),
    };
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => {
            // a closed pipe is not an error for a report printer
            let _ = writeln!(std::io::stdout().lock(), "{json}");
        }
    }
    if outcome.alarm {
        eprintln!("consistency alarm: see report");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
