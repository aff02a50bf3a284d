use std::process::ExitCode;

use pqec_cli::{parse_config, run_experiment, write_report, CliError};

fn main() -> ExitCode {
    let result = parse_config(std::env::args_os()).and_then(|config| {
        let report = run_experiment(&config)?;
        write_report(&config, &report)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
