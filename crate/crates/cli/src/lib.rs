//! Config-driven batch runs of the panel flutter solver: natural frequencies,
//! flutter boundaries, parametric sweeps and mesh convergence studies, each
//! written as a CSV table with a metadata header plus gnuplot data files.

pub mod config;
pub mod output;
pub mod run;

pub use config::{load_config, parse_config, ConfigError, RunConfig};
pub use run::{run_convergence, run_flutter, run_modes, run_sweep, Outputs, RunError};
