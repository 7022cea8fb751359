//! The `ideal` command-line tool: configuration, commands and artifacts.
//!
//! `fit` runs the whole pipeline on one configuration; `summarize`, `pivots`,
//! `ppc` and `diagnose` re-analyse a finished run directory; `simulate`
//! writes synthetic data together with a ready-to-run configuration.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;

use args::{Cli, Command};
pub use config::RunConfig;
pub use error::{CliError, Result};

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fit(_) => "fit",
            Command::Simulate(_) => "simulate",
            Command::Summarize(_) => "summarize",
            Command::Pivots(_) => "pivots",
            Command::Ppc(_) => "ppc",
            Command::Diagnose(_) => "diagnose",
        }
    }
}

/// Runs one parsed command and returns its report.
pub fn execute(cli: &Cli) -> Result<String> {
    let g = &cli.global;
    Ok(match &cli.command {
        Command::Fit(a) => commands::fit(g, a)?.to_string(),
        Command::Simulate(a) => commands::simulate_cmd(g, a)?.to_string(),
        Command::Summarize(a) => commands::summarize(g, a)?.to_string(),
        Command::Pivots(a) => commands::pivots(g, a)?.to_string(),
        Command::Ppc(a) => commands::ppc(g, a)?.to_string(),
        Command::Diagnose(a) => commands::diagnose(g, a)?.to_string(),
    })
}

/// Full process behaviour minus argument parsing: thread pool, logging,
/// report on stdout, JSON error record on stderr. Returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let level = if cli.global.quiet { "error" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return report_error(&CliError::Config("--threads must be positive".into()), cli.command.name());
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match execute(&cli) {
        Ok(text) => {
            if !cli.global.quiet {
                print!("{text}");
            }
            0
        }
        Err(e) => report_error(&e, cli.command.name()),
    }
}

fn report_error(e: &CliError, command: &str) -> i32 {
    let record = e.record(command);
    match serde_json::to_string(&record) {
        Ok(json) => eprintln!("{json}"),
        Err(_) => eprintln!("{e}"),
    }
    record.exit_code
}
