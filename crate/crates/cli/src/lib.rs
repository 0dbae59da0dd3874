//! Library half of the `optomech` binary: config ingestion, figure presets,
//! CSV/JSON emission, and the dispatch logic, kept out of `main.rs` so the
//! integration tests can drive the same code paths in-process.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;
