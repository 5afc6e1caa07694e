//! Batch driver behind the `rumin` binary: every subcommand resolves its
//! parameters into a [`output::RunConfig`] and returns one [`output::Artifact`].

pub mod args;
mod commands;
pub mod output;

use anyhow::Result;

use args::{Cli, Command};
use output::Artifact;

pub fn run(cli: &Cli) -> Result<Artifact> {
    let c = &cli.common;
    match &cli.command {
        Command::Dims => commands::dims(c),
        Command::Basis => commands::basis(c),
        Command::Dc { laplacian } => commands::dc(c, *laplacian),
        Command::Verify { check_file, maps } => commands::verify(c, check_file.as_deref(), *maps),
        Command::Symbol => commands::symbol(c),
        Command::Decompose { input } => commands::decompose(c, input),
        Command::Gn {
            form,
            form_file,
            tolerance,
        } => commands::gn(c, *form, form_file.as_deref(), *tolerance),
    }
}
