use std::fs;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use taf_cli::{exit, render, run, RunConfig};

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(exit::INPUT_ERROR);
        }
    };
    let output = run(&config);
    let text = render(&output.report, config.format);
    match &config.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text + "\n") {
                eprintln!("taf: cannot write {}: {e}", path.display());
                return ExitCode::from(exit::INPUT_ERROR);
            }
        }
        None => println!("{text}"),
    }
    ExitCode::from(output.code)
}
