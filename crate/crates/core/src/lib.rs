//! L1-norm principal component analysis.
//!
//! Maximizes `F(U) = ||X^T U||_1` over matrices `U` with orthonormal
//! columns using four iterative schemes built on a deterministic polar
//! decomposition:
//!
//! * NGA: `U+ = PD(X sgn(X^T U))`.
//! * S-PNGA: NGA with a proximal weight `tau` on the sign step.
//! * PAMe: proximal alternating maximization with weights `tau`, `beta`
//!   and extrapolation `gamma`.
//! * S-PAMe: PAMe with `beta = 0`.
//!
//! Alongside the solvers the crate provides optimality certificates, an
//! exhaustive oracle for small instances, convergence traces and a CLI.
//!
//! ```
//! use l1pca::prelude::*;
//!
//! let x = DenseMatrix::from_rows(&[[3.0, 1.0, -2.0], [4.0, 0.5, 1.0]]).unwrap();
//! let u0 = init_u(2, 1, 0, InitScheme::SvdWarmStart(&x)).unwrap();
//! let trace = run(&x, &SolverConfig::nga(), &u0).unwrap();
//! assert!(trace.terminal.unwrap().foc_certified);
//! ```

pub mod cli;
pub mod data;
pub mod error;
pub mod optimality;
pub mod oracle;
pub mod polar_core;
pub mod solvers;
pub mod trace;

pub use error::{L1PcaError, Result};

pub mod prelude {
    pub use crate::data::{generate, load_csv, save_csv, InstanceSpec};
    pub use crate::error::{L1PcaError, Result};
    pub use crate::optimality::{check_foc, check_kkt, check_partial_max, subgrad_member, OptimalityReport};
    pub use crate::oracle::{brute_force_fmax, gamma_threshold, tau0_from_trace, tau_star, OracleResult};
    pub use crate::polar_core::{
        compact_svd, polar_decompose, polar_u_registered, sgn_matrix, DataMatrix, DenseMatrix, PdRegistry,
        PolarFactors, SignMatrix, StiefelMatrix,
    };
    pub use crate::solvers::{
        init_u, objective_bilinear, objective_f, run, run_with, Algorithm, InitScheme, RunOptions, SolverConfig,
        StopReason,
    };
    pub use crate::trace::{estimate_rho, step_bound, BoundKind, ConvergenceTrace};
}
