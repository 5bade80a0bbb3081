//! Experiment harness for `gsdca`: JSON-configured solver comparisons,
//! learning-rate tuning, CSV traces, manifests and SVG charts.

pub mod config;
mod error;
pub mod output;
pub mod plot;
pub mod presets;
pub mod problem;
pub mod runner;
pub mod solve;
pub mod tune;

pub use error::{Error, Result};
