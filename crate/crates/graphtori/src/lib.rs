//! Command-line lab for graphical 3-tori: configuration, raw field IO,
//! CSV reports, parallel sweeps and the `verify` battery.

pub mod commands;
pub mod config;
pub mod format;
pub mod pipeline;
pub mod rawfield;
pub mod verify;

pub use config::{load_config, parse_config, RunConfig};
pub use verify::{verify, VerifyReport};
