//! Scenario-driven front end for berryem: a JSON config selects a command
//! and its parameters, and the run writes one primary CSV or JSON file plus
//! a metadata JSON next to it.

pub mod run;
pub mod scenario;

pub use run::{run, RunOptions, RunReport};
pub use scenario::{validate, Command, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(#[from] berryem::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad configs, 3 for numerical failures, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            _ => 1,
        }
    }
}
