//! Front end for the `rsd` binary: fixture generation, decomposition,
//! verification, cube comparison and SVG rendering.

pub mod args;
pub mod commands;
pub mod error;
pub mod render;

pub use args::Cli;
pub use error::CliError;

use args::Command;
use commands::{cz_text, decompose_text, emit, gen_text, render_text, verify_report};

/// Run one command. The report of a failed verification is still written.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Decompose(args) => emit(args.output.as_ref(), &decompose_text(&args)?),
        Command::Verify(args) => {
            let report = verify_report(&args)?;
            emit(args.output.as_ref(), &report.to_string())?;
            if report.all_ok() {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }
        Command::Cz(args) => {
            let (cubes, comparison) = cz_text(&args)?;
            emit(args.output.as_ref(), &cubes)?;
            emit(None, &comparison)
        }
        Command::Gen(args) => emit(args.output.as_ref(), &gen_text(&args)?),
        Command::Render(args) => emit(args.output.as_ref(), &render_text(&args)?),
    }
}
