use clap::Parser;

use ab_solenoid::cli::{run, Args};

fn main() {
    let args = Args::parse();
    std::process::exit(run(&args));
}
