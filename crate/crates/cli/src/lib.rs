//! The `ltr` command line: reproducible report runs over `levy-transience`.

pub mod args;
pub mod commands;
pub mod config;

use std::path::Path;

use serde::Serialize;

pub use args::{Cli, Command, DemoName, Format};
pub use commands::run;
pub use config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or invalid configuration, or parameters
    /// outside a law's domain.
    Usage(String),
    /// A numerical routine failed or a checked bound did not hold.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<levy_transience::Error> for CliError {
    fn from(e: levy_transience::Error) -> Self {
        use levy_transience::Error as E;
        match e {
            E::Domain(_) | E::Hypothesis(_) | E::UnsupportedComparison(_) => {
                CliError::Usage(e.to_string())
            }
            E::Numeric { .. } | E::Structural(_) | E::CapHit { .. } => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

/// Outcome of a command: 0 when decided, 2 when undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Decided,
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub outcome: Outcome,
    pub result: serde_json::Value,
    #[serde(skip)]
    pub csv: String,
    /// A human-readable summary for the terminal.
    #[serde(skip)]
    pub summary: String,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Outcome::Decided => 0,
            Outcome::Undecided => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize to JSON") + "\n"
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.csv.clone(),
        }
    }

    /// Writes `<command>.json` and `<command>.csv` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), CliError> {
        let io =
            |e: std::io::Error| CliError::Usage(format!("cannot write to {}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        let stem = self.command.replace(' ', "-");
        std::fs::write(dir.join(format!("{stem}.json")), self.to_json()).map_err(io)?;
        std::fs::write(dir.join(format!("{stem}.csv")), &self.csv).map_err(io)?;
        Ok(())
    }
}
