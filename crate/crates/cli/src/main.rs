use std::fs::File;
use std::io::{self, BufWriter};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use dj_coherence_cli::{run, Cli};

/// Exit status when a `*_ok` column contains `false`.
const ASSERTION_FAILED: u8 = 3;

fn execute(cli: &Cli) -> Result<ExitCode> {
    let table = run(cli)?;
    match &cli.output {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            table.write(cli.format, BufWriter::new(file))?;
        }
        None => table.write(cli.format, io::stdout().lock())?,
    }
    let failed = table.failed_assertions();
    for (row, column) in &failed {
        eprintln!("check failed: row {row}, column {column}");
    }
    Ok(if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(ASSERTION_FAILED)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
