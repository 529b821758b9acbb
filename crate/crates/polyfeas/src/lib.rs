//! File formats, benchmark harness, self-checks and the `polyfeas` command
//! line on top of `polyfeas-core`.

pub mod bench;
pub mod cli;
pub mod error;
pub mod io;
pub mod mesh;
pub mod selfcheck;

pub use error::CliError;
