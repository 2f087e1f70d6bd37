use clap::Parser;
use sms_cli::{execute, Cli};

fn main() {
    if let Err(e) = execute(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(e.code);
    }
}
