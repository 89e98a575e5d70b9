use std::process::ExitCode;

use clap::Parser;
use hybrid_table_cli::{execute, Cli};

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hybrid-table: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
