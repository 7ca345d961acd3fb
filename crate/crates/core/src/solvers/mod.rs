//! NGA, S-PNGA, PAMe and S-PAMe with a shared instrumented driver.

pub mod config;
pub mod init;
pub mod run;
pub mod steps;

pub use config::{Algorithm, RunOptions, SolverConfig, SolverState, StopReason, MAX_ITER_CAP, NGA_DEFAULT_MAX_ITER};
pub use init::{init_u, InitKind, InitScheme};
pub use run::{run, run_with, PAME_U_TOL};
pub use steps::{nga_step, objective_bilinear, objective_f, pame_step, spame_step, spnga_step};
