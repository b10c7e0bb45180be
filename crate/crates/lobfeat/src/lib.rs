//! Standard-library companion of `lobfeat-core`: CSV and binary file
//! formats, TOML configuration, synthetic data generators and report
//! writers. The `lobfeat` binary wires them into a command-line tool.

pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod synth;

pub use error::{LobfeatError, Result};
