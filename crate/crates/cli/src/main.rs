//! `tdiam` command-line front end.
//!
//! Exit status: 0 on success, 1 when a library contract fails (degenerate
//! cloud, budget exceeded, …), 2 on usage errors.

mod args;
mod commands;
mod sets;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(String),
}

impl From<tdiam::Error> for Failure {
    fn from(e: tdiam::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn dispatch(command: &Command) -> Result<commands::Output, Failure> {
    match command {
        Command::Enumerate(a) => commands::run_enumerate(a),
        Command::Leja(a) => commands::run_leja(a),
        Command::Diameter(a) => commands::run_diameter(a),
        Command::Markov(a) => commands::run_markov(a),
        Command::VerifyLemma(a) => commands::run_verify_lemma(a),
        Command::VerifyTheorem(a) => commands::run_verify_theorem(a),
        Command::FeketeOracle(a) => commands::run_fekete(a),
    }
}

fn out_path(command: &Command) -> Option<&std::path::Path> {
    let output = match command {
        Command::Enumerate(a) => &a.output,
        Command::Leja(a) => &a.output,
        Command::Diameter(a) => &a.output,
        Command::Markov(a) => &a.output,
        Command::VerifyLemma(a) => &a.output,
        Command::VerifyTheorem(a) => &a.output,
        Command::FeketeOracle(a) => &a.output,
    };
    output.out.as_deref()
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Domain(e.to_string()))?;
    }
    let output = dispatch(&cli.command)?;
    match out_path(&cli.command) {
        Some(path) => {
            std::fs::write(path, &output.body)
                .map_err(|e| Failure::Domain(format!("cannot write {}: {e}", path.display())))?;
            println!("{}", output.summary);
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.body.as_bytes())
                .map_err(|e| Failure::Domain(e.to_string()))?;
            eprintln!("{}", output.summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
