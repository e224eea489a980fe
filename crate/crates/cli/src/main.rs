//! `symcanon`: file-in/file-out front end for `symcanon-core`.
//!
//! Exit codes: 0 on success, 2 when the input violates a numerical
//! precondition (singular, degenerate, not positive definite, ...), 1 for
//! I/O, parse and usage errors.

mod args;
mod commands;
mod input;
mod output;

use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::json;
use symcanon_core::Error;

use args::{Cli, Command, Format};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(core) if !core.is_parse() => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cmd: &Command) -> Result<()> {
    if let Command::Gen(g) = cmd {
        let doc = commands::generate(g)?;
        return emit(g.output.as_deref(), &output::render(&doc));
    }
    let c = match cmd {
        Command::Invariants(c)
        | Command::Decompose(c)
        | Command::Williamson(c)
        | Command::Condense(c)
        | Command::ChannelNormalize(c)
        | Command::ValidateChannel(c)
        | Command::ValidateState(c)
        | Command::Witness(c) => c,
        Command::Gen(_) => unreachable!(),
    };
    let tol = commands::tolerances(c)?;
    let inp = input::load(&c.input)?;
    let outcome = commands::analyze(cmd, c, &tol, &inp)?;
    let text = match c.format {
        Format::Human => outcome.human,
        Format::Machine => output::render(&json!({
            "command": cmd.name(),
            "seed": c.seed,
            "tolerances": tol,
            "input_sha256": inp.sha256,
            "result": outcome.result,
        })),
    };
    emit(c.output.as_deref(), &text)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
