//! Command-line front end: argument definitions, subcommands, exit codes and
//! run manifests.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;

use args::{Cli, Command};
use error::CliResult;

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Generate(a) => {
            let key = std::env::var(valueprobe::generator::API_KEY_ENV).ok();
            let s = commands::cmd_generate(a, key.as_deref())?;
            log::info!("{} records written ({} ok, {} failed)", s.requested, s.succeeded, s.failed);
        }
        Command::Score(a) => {
            commands::cmd_score(a)?;
        }
        Command::Metrics(a) => {
            let doc = commands::cmd_metrics(a)?;
            let s = &doc.metrics.summary;
            log::info!("row hits {}/{}, column hits {}/{}", s.row_hits, s.row_count, s.column_hits, s.column_count);
        }
        Command::Structure(a) => {
            let doc = commands::cmd_structure(a)?;
            log::info!("phi {:.3}, stress {:.4}", doc.structure.fit.phi, doc.structure.configuration.stress);
        }
        Command::BaselineInstrument(a) => commands::cmd_baseline_instrument(a)?,
        Command::BaselineWordfreq(a) => {
            commands::cmd_baseline_wordfreq(a)?;
        }
        Command::Report(a) => {
            commands::cmd_report(a)?;
        }
        Command::ServeMock(a) => commands::cmd_serve_mock(a)?,
    }
    Ok(())
}
