//! Orchestration for the `lrgap` command: configs, the respond → spectrum →
//! scaling pipeline, and on-disk artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod manifest;
pub mod pipeline;

use std::path::PathBuf;

pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Module {
        context: String,
        #[source]
        source: lrgap::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn module(context: impl Into<String>, source: lrgap::Error) -> Self {
        CliError::Module { context: context.into(), source }
    }

    /// 1 for bad inputs, 2 for numerical or I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Module { source, .. } if source.is_config() => 1,
            _ => 2,
        }
    }
}
