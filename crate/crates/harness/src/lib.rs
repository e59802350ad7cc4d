//! Reproducible Monte Carlo experiments on top of [`hypimetric`]: seeded
//! per-replicate streams, schema-checked configuration, long-format CSV
//! output and run manifests. The `hypilab` binary is a thin wrapper around
//! [`cli::main_with`].

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod run;
pub mod seed;

pub use config::{Experiment, ExperimentConfig, RawConfig};
pub use error::{HarnessError, Result};
pub use run::{compute, run, RunManifest};
pub use seed::split_seed;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/harness.md")]
mod guide {}
