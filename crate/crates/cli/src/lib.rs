//! Scenario runner behind the `permanence` binary: config parsing, single
//! runs, parameter sweeps, the invariant suite and report rendering.

pub mod config;
pub mod report;
pub mod scenario;
pub mod sweep;
pub mod verify;

pub use config::{ConfigError, Kind, ScenarioConfig, ToleranceParams};
pub use report::{Format, ScenarioReport, Verdict};
pub use scenario::{run, RunError};
pub use sweep::{sweep, Axis};
pub use verify::{verify, DEFAULT_SEED};

/// Exit status when every verdict passes.
pub const EXIT_PASS: i32 = 0;
/// Exit status when at least one verdict fails.
pub const EXIT_VERDICT_FAILURE: i32 = 1;
/// Exit status for unreadable or invalid configuration.
pub const EXIT_CONFIG_ERROR: i32 = 2;
