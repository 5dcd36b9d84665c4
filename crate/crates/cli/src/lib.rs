//! Config-driven report pipeline and command implementations behind the
//! `mingauge` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod pipeline;

use thiserror::Error;

/// Exit code for a run whose checks all pass.
pub const EXIT_PASS: i32 = 0;
/// Exit code when at least one applicable check fails.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code for configuration and usage errors.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] mingauge::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) | CliError::Core(_) => EXIT_CONFIG,
        }
    }
}
