//! Certificates for the optimality hierarchy: subgradient membership, FOC
//! (fixed point of the polar step), KKT (symmetric multiplier) and partial
//! maximality of a `(U, S)` pair.

use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Result};
use crate::polar_core::dense::sgn_scalar;
use crate::polar_core::{
    min_eigenvalue, polar_decompose, x_times_sign, DataMatrix, DenseMatrix, SignMatrix, StiefelMatrix,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub is_subgrad_member: bool,
    /// `||W - U H||_F` with `W = X S` and `H = sym(U^T W)`.
    pub foc_residual: f64,
    /// `||W - U Lambda||_F` with `Lambda = sym(U^T W)`.
    pub kkt_residual: f64,
    /// `||U - PD(W).u||_F`, reported only when `W` has full column rank.
    pub pd_distance: Option<f64>,
    pub h_min_eig: f64,
    pub rank_w: usize,
    pub is_foc: bool,
    pub is_kkt: bool,
    pub is_partial_max: bool,
    pub tol: f64,
    pub zero_tol: f64,
}

/// `1e-9 * max_i ||x_i||`.
pub fn default_zero_tol(x: &DataMatrix) -> f64 {
    1e-9 * x.column_norms().into_iter().fold(0.0, f64::max)
}

/// `1e-8 * ||X||_F`.
pub fn default_tol(x: &DataMatrix) -> f64 {
    1e-8 * x.frobenius_norm()
}

fn check_shapes(x: &DataMatrix, u: &StiefelMatrix, s: &SignMatrix) -> Result<()> {
    if x.rows() != u.d() || x.cols() != s.rows() || u.k() != s.cols() {
        return Err(shape_err(format!(
            "incompatible shapes: X {}x{}, U {}x{}, S {}x{}",
            x.rows(),
            x.cols(),
            u.d(),
            u.k(),
            s.rows(),
            s.cols()
        )));
    }
    Ok(())
}

/// Whether `S` lies in the subdifferential of `||.||_1` at `V = X^T U`,
/// treating entries with `|v| <= zero_tol` as zeros.
pub fn subgrad_member(x: &DataMatrix, u: &StiefelMatrix, s: &SignMatrix, zero_tol: f64) -> Result<bool> {
    check_shapes(x, u, s)?;
    let v = x.t_matmul(u.as_matrix())?;
    Ok(v.as_slice()
        .iter()
        .zip(s.as_slice())
        .all(|(&vi, &si)| vi.abs() <= zero_tol || si == sgn_scalar(vi)))
}

/// Full certificate with explicit tolerances.
pub fn certify(x: &DataMatrix, u: &StiefelMatrix, s: &SignMatrix, tol: f64, zero_tol: f64) -> Result<OptimalityReport> {
    let is_subgrad_member = subgrad_member(x, u, s, zero_tol)?;
    let w = x_times_sign(x, s)?;
    let um = u.as_matrix();
    let h = um.t_matmul(&w)?.symmetrize()?;
    let residual = w.sub(&um.matmul(&h)?)?.frobenius_norm();
    let h_min_eig = min_eigenvalue(&h)?;
    let pd = polar_decompose(&w)?;
    let pd_distance = if pd.is_full_rank() { Some(u.distance(&pd.u)?) } else { None };
    let kkt_ok = residual <= tol;
    let pd_ok = kkt_ok && h_min_eig >= -tol;
    Ok(OptimalityReport {
        is_subgrad_member,
        foc_residual: residual,
        kkt_residual: residual,
        pd_distance,
        h_min_eig,
        rank_w: pd.rank,
        is_foc: is_subgrad_member && pd_ok,
        is_kkt: is_subgrad_member && kkt_ok,
        is_partial_max: is_subgrad_member && pd_ok,
        tol,
        zero_tol,
    })
}

/// FOC: `U` is a U-factor of `W = X S` with `S` a subgradient at `X^T U`.
pub fn check_foc(x: &DataMatrix, u: &StiefelMatrix, s: &SignMatrix, tol: f64) -> Result<OptimalityReport> {
    certify(x, u, s, tol, default_zero_tol(x))
}

/// KKT: `W = U Lambda` with `Lambda` symmetric, no PSD requirement.
pub fn check_kkt(x: &DataMatrix, u: &StiefelMatrix, s: &SignMatrix, tol: f64) -> Result<OptimalityReport> {
    certify(x, u, s, tol, default_zero_tol(x))
}

/// `S` maximizes `<X^T U, .>` over `{0, +-1}` entries and `U` maximizes
/// `<X S, .>` over the Stiefel manifold.
pub fn check_partial_max(x: &DataMatrix, u: &StiefelMatrix, s: &SignMatrix, tol: f64) -> Result<bool> {
    Ok(certify(x, u, s, tol, default_zero_tol(x))?.is_partial_max)
}

/// Both sides of the strong-concavity gap at the U-factor of `c`:
/// `lhs = <U, C> - <Z, C>`, `rhs = lambda_min(H) / 2 * ||U - Z||_F^2`.
pub fn polar_gap(c: &DenseMatrix, z: &StiefelMatrix) -> Result<(f64, f64)> {
    if c.shape() != z.as_matrix().shape() {
        return Err(shape_err(format!("C is {:?} but Z is {:?}", c.shape(), z.as_matrix().shape())));
    }
    let pd = polar_decompose(c)?;
    let lhs = pd.u.as_matrix().inner(c)? - z.as_matrix().inner(c)?;
    let dist = pd.u.distance(z)?;
    Ok((lhs, 0.5 * pd.lambda_min * dist * dist))
}
