//! File formats, least-squares analysis and the `oofa` command-line tool
//! built on [`oofa_core`].

pub mod analysis;
pub mod cli;
mod error;
pub mod formats;

pub use error::{Error, ErrorKind, Result};
pub use oofa_core;
