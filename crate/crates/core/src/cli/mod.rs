//! Command-line front end for the `wright` binary.
//!
//! Exit codes: 0 on success or certification, 1 when a check fails or a
//! certificate is not obtained, 2 on invalid input or I/O failure.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;

use clap::{Parser, Subcommand};

pub use config::{CommandKind, Format, ModelKind, RunConfig, Settings, OUT_DIR_ENV};

use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "wright", version, about = "Stability evidence for x'(t) = f(x(t-1))")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Check the hypotheses and classify the shape of f
    Check(Settings),
    /// Certify global attraction under the 3/2 condition
    Certify(Settings),
    /// Integrate from a constant history; writes the trajectory and extrema
    Simulate(Settings),
    /// Sample the k-th extremum map over a grid of constant histories
    Returnmap(Settings),
    /// Sweep one parameter and record the asymptotic amplitude
    Scan(Settings),
    /// Run the inequality battery for (a, b) or a model; writes lemmas.json
    VerifyLemmas(Settings),
}

impl Cmd {
    fn split(self) -> (CommandKind, Settings) {
        match self {
            Cmd::Check(s) => (CommandKind::Check, s),
            Cmd::Certify(s) => (CommandKind::Certify, s),
            Cmd::Simulate(s) => (CommandKind::Simulate, s),
            Cmd::Returnmap(s) => (CommandKind::Returnmap, s),
            Cmd::Scan(s) => (CommandKind::Scan, s),
            Cmd::VerifyLemmas(s) => (CommandKind::VerifyLemmas, s),
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (kind, settings) = cli.command.split();
    let result = RunConfig::resolve(kind, settings).and_then(|cfg| commands::execute(&cfg));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Inconclusive(_) => 1,
                _ => 2,
            }
        }
    }
}
