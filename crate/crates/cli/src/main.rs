use std::process::ExitCode;

use clap::Parser;
use curved_nbody_cli::app::{run, Cli};

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
