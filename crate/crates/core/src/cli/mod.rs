//! Scenario configuration, presets, sweeps and reports behind the
//! `beamshare` binary.

pub mod config;
pub mod presets;
pub mod report;
pub mod sweep;

pub use config::{parse_config, parse_config_str, ScenarioConfig, SchemeOverride};
pub use presets::preset;
