pub mod config;
pub mod pgm;
pub mod problem;
pub mod trace;

pub use config::{load_config, parse_config, render_config, RunConfig};
pub use pgm::{read_pgm, write_pgm, GrayImage};
pub use trace::{read_trace, write_trace, TraceRow};
