//! Configuration, orchestration and CSV output for the `morrey` binary.

// `!(a > b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod run;

pub use config::{parse_config, render, Command, FieldSpec, PairSource, RunConfig};
pub use error::CliError;
pub use run::{run, run_to_writer};
