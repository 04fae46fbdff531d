//! Scenario configuration, sweeps, CSV/JSON emission and the verification
//! suite for the `quench-entropy` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod series;
pub mod verify;

pub use config::{KMax, Output, Overrides, ScenarioConfig};
pub use error::{CliError, Result};
pub use series::{BoundRow, BoundSeries};
