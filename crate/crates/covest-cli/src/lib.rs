//! IO, file formats, and command implementations for the `covest` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod report;
