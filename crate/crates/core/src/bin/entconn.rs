use std::process::ExitCode;

use entconn::cli::{self, Parsed};

fn main() -> ExitCode {
    let inv = match cli::parse(std::env::args_os()) {
        Ok(Parsed::Help(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Ok(Parsed::Run(inv)) => inv,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code.clamp(1, 255) as u8);
        }
    };
    match cli::execute(&inv) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
