//! Command-line front end for `pqbs-core`: function loading, result tables
//! and their CSV/JSON encodings, and the subcommand runners.

pub mod error;
pub mod output;
pub mod run;
pub mod sampled;

pub use error::CliError;
pub use output::{Cell, Format, Table};
pub use run::{run, run_and_write, BoundKind, Command, RunConfig, RunOutput};
pub use sampled::{load_sampled, resolve_function};
