//! `fairdecomp`: generate graphs, run decompositions and estimation
//! campaigns, build embeddings, and dump the data behind the empirical
//! figures.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on runtime errors.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<commands::UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
