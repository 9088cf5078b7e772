//! Library surface of the experiment harness: configuration schema,
//! built-in presets, command implementations and snapshot I/O. The
//! `momentuq` binary is a thin argument-parsing layer over this crate.

pub mod config;
pub mod presets;
pub mod runner;
pub mod snapshot;
