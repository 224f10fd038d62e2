//! Library surface of the CLI: job parsing, report emission, and the
//! survey driver, kept separate from `main` so the integration tests can
//! drive them directly.

pub mod job;
pub mod report;
pub mod survey;
