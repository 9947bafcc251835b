//! Parallel drivers, file formats, and the `ramsey` command line for
//! `ramsey-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod parallel;
pub mod table;

pub use error::{LabError, LabResult};
