//! Library half of the `scone` command-line tool: model-file ingestion with
//! schema validation and canonicalization, the check registry, deterministic
//! report assembly, and the run/verify orchestrators. The binary in
//! `main.rs` is a thin argument-parsing wrapper over this crate so that
//! integration tests can exercise the same code paths in process.

pub mod checks;
pub mod model;
pub mod report;
pub mod runner;
