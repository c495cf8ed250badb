//! Experiment harness around the `multiwinner` library: configuration,
//! seeded parallel execution, CSV/PGM artifacts, and content-hash
//! manifests. The `multiwinner` binary is a thin CLI over these modules.

pub mod config;
pub mod error;
pub mod io;
pub mod render;
pub mod runner;
