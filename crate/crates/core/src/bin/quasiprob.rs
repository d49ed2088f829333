use clap::Parser;
use quasiprob::cli::{run, Cli};

fn main() {
    let outcome = run(&Cli::parse());
    if outcome.code == 0 {
        print!("{}", outcome.text);
    } else {
        eprint!("{}", outcome.text);
    }
    std::process::exit(outcome.code);
}
