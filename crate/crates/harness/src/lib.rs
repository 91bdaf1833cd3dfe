//! Configuration, validation cases, studies and file output for the
//! `mrpoisson` command.

pub mod cases;
pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod study;

pub use config::RunConfig;
pub use error::{HResult, HarnessError};
