//! Dense linear-algebra kernel: matrices, compact SVD, polar decomposition
//! and a memoising U-factor registry.

pub mod dense;
pub mod polar;
pub mod registry;
pub mod svd;

pub use dense::{
    orthonormality_residual, sgn_matrix, x_times_sign, DataMatrix, DenseMatrix, SignMatrix,
    StiefelMatrix,
};
pub use polar::{polar_decompose, shrink_check, sigma_plus_min, PolarFactors};
pub use registry::{polar_u_registered, PdRegistry};
pub use svd::{
    compact_svd, min_eigenvalue, nuclear_norm, singular_values, spectral_norm, sym_eigen, Svd,
    SymEigen, RANK_RTOL,
};
