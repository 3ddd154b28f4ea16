//! Command implementations behind the `chiplink` binary.
//!
//! Each command reads a [`config::ScenarioConfig`], writes CSV/JSON/text
//! reports into the configured output directory, and returns an [`Outcome`]
//! for the binary to print.

pub mod commands;
pub mod config;
pub mod output;

/// What a command reports back to the terminal.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
    /// A verification check failed; the binary exits nonzero.
    pub failed: bool,
}

impl Outcome {
    pub fn ok(lines: Vec<String>) -> Self {
        Self { lines, ..Self::default() }
    }
}
