//! Experiment runner behind the `bidisk` binary: configuration loading,
//! command dispatch and deterministic report writing.

pub mod config;
pub mod error;
pub mod run;

use std::fs;
use std::io::Write;
use std::path::Path;

pub use config::{Cli, Command, RunConfig};
pub use error::CliError;
pub use run::{run, Output};

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

/// Writes an [`Output`]. With `out`, the JSON goes to `out` (and the CSV, if
/// any, next to it with a `.csv` extension); otherwise both go to stdout.
pub fn emit(output: &Output, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(csv) = &output.csv {
                write_file(&path.with_extension("csv"), csv)?;
            }
            write_file(path, &output.json)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let mut text = String::new();
            if let Some(csv) = &output.csv {
                text.push_str(csv);
                text.push('\n');
            }
            text.push_str(&output.json);
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io("stdout".into(), e))
        }
    }
}

/// Runs the parsed command line and returns the process exit status.
pub fn execute(cli: &Cli) -> i32 {
    let cfg = match RunConfig::from_cli(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let result = run(&cfg).and_then(|o| emit(&o, cfg.out.as_deref()).map(|_| o.exit_code));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let body = run::to_json(&e.to_json());
            let written = Output { json: body, csv: None, exit_code: e.exit_code() };
            if let Err(w) = emit(&written, cfg.out.as_deref()) {
                eprintln!("error: {w}");
            }
            e.exit_code()
        }
    }
}
