//! Experiment harness around [`mems_core`].
//!
//! The core crate solves the equations; this crate turns the solvers into
//! named, reproducible experiments. Each experiment reads a TOML config,
//! runs one pipeline, and leaves behind a self-describing `record.json`,
//! a `series.csv` per time series, and SVG plots, all byte-deterministic
//! for identical configs. `verify-all` chains the whole acceptance suite
//! and is the one command a release must pass.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod plots;
pub mod record;

pub use error::{Error, Result};
