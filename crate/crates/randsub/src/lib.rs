//! Command-line front end and file formats for `randsub-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};

use randsub_core::SupportCap;

use crate::cli::{Cli, Command};
use crate::error::CliError;
use crate::table::Output;

pub fn support_cap(cli: &Cli) -> SupportCap {
    cli.support_cap.map_or(SupportCap::DEFAULT, SupportCap)
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let cap = support_cap(cli);
    match &cli.command {
        Command::Dist(a) => commands::dist(a, cap),
        Command::Moments(a) => commands::moments(a),
        Command::Entropy(a) => commands::entropy(a, cap),
        Command::Hvar(a) => commands::hvar(a, cap),
        Command::Extrema(a) => commands::extrema(a),
        Command::Simulate(a) => commands::simulate(a, cap),
    }
}

/// Runs the command and writes its output. The CSV summary block, if any,
/// goes to stderr.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let output = execute(cli)?;
    let stderr = io::stderr();
    let mut summary = stderr.lock();
    match &cli.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            output.write(cli.format, &mut w, &mut summary)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            output.write(cli.format, &mut w, &mut summary)?;
            w.flush()?;
        }
    }
    Ok(())
}
