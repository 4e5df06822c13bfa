use std::process::ExitCode;

use clap::Parser;
use lowrank_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are input errors; help and version output are not.
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let json = outcome.report.to_json();
            match cli.global.json.as_deref() {
                Some(p) if p.as_os_str() == "-" => println!("{json}"),
                Some(p) => {
                    if let Err(e) = std::fs::write(p, json + "\n") {
                        eprintln!("error: {}: {e}", p.display());
                        return ExitCode::from(3);
                    }
                    println!("{}", outcome.report.summary());
                }
                None => println!("{}", outcome.report.summary()),
            }
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
