//! Library side of the `trolab` binary: argument types, commands, the report
//! envelope and the built-in example corpus.

pub mod commands;
pub mod corpus;
pub mod report;

pub use commands::{run, Cli, Command, Outcome};
pub use report::{Report, RunConfig};
