use clap::Parser;
use drsub_cli::app::{error_json, run, Cli};

fn main() {
    if let Err(err) = run(Cli::parse()) {
        eprintln!("{}", error_json(&err));
        std::process::exit(1);
    }
}
