//! Experiment harness, file formats and command-line front end for
//! [`visolve_core`].

pub mod cli;
pub mod clock;
pub mod error;
pub mod format;
pub mod harness;

pub use error::{Error, Result};
