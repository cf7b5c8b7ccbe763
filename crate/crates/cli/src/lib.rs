//! Library side of the `catxai` binary: the diagram DSL and the
//! subcommand implementations.

pub mod commands;
pub mod dsl;
