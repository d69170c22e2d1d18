//! File formats, parallel Monte Carlo and the `ceqec` command-line tool,
//! built on [`ceqec_core`].

pub mod circuitfile;
pub mod cli;
pub mod codefile;
pub mod codes;
pub mod config;
pub mod error;
pub mod report;
pub mod sim;
mod text;
pub mod twirl;

pub use error::{Error, ParseError, Result};
