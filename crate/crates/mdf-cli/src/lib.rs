//! Library surface of the command-line harness, exposed so integration
//! tests (and embedders) can drive experiments in-process.

pub mod config;
pub mod experiment;
pub mod report;
