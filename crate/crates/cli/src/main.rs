use std::process::ExitCode;

use prismbell_cli::{parse_cli, run, CliError};

fn main() -> ExitCode {
    let config = match parse_cli(std::env::args_os()) {
        Ok(config) => config,
        Err(CliError::Parse(err)) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
        Err(err) => {
            eprintln!("error: {err}");
            eprintln!("\nFor more information, try '--help'.");
            return ExitCode::from(err.exit_code());
        }
    };
    match run(&config) {
        Ok(_) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
