//! Configuration, scenario execution and field export for the `starcurl`
//! command-line tool.

pub mod config;
pub mod error;
pub mod export;
pub mod run;

use std::path::PathBuf;

use crate::config::parse_config_as;
use crate::error::{CliError, ConfigError};

/// Command-line overrides applied on top of a configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub grid_n: Option<usize>,
}

/// Reads the config at `path` for subcommand `kind`, applies `overrides` and
/// runs it. The report is printed to stdout.
pub fn execute(kind: &str, path: &std::path::Path, overrides: &Overrides) -> Result<run::Outcome, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg = parse_config_as(&text, Some(kind))?;
    if let Some(out) = &overrides.out {
        cfg.output.dir = out.clone();
    }
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(n) = overrides.grid_n {
        if !(8..=256).contains(&n) {
            return Err(ConfigError::new(None, format!("--grid-n {n} is out of range (8..=256)")).into());
        }
        cfg.n = n;
    }
    let outcome = run::run(&cfg)?;
    print!("{}", outcome.report);
    Ok(outcome)
}

/// Caps the global thread pool at `STARCURL_THREADS` when set.
pub fn init_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("STARCURL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ConfigError::new(None, format!("STARCURL_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError::new(None, format!("cannot size thread pool: {e}")))
}
