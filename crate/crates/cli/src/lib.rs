//! Command-line harness for `drsub`: configuration, graph readers, the
//! experiment drivers and CSV/JSON output.

pub mod app;
pub mod config;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod families;
pub mod graph_io;

pub use error::{CliError, Result};
