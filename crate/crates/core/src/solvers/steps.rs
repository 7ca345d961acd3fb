use crate::error::{shape_err, L1PcaError, Result};
use crate::polar_core::dense::sgn_unchecked;
use crate::polar_core::{
    polar_decompose, polar_u_registered, x_times_sign, DataMatrix, DenseMatrix, PdRegistry, SignMatrix,
    StiefelMatrix,
};
use crate::solvers::config::SolverState;

fn check_u(x: &DataMatrix, u: &StiefelMatrix) -> Result<()> {
    if x.rows() != u.d() {
        return Err(shape_err(format!("X has {} rows but U has {}", x.rows(), u.d())));
    }
    Ok(())
}

/// `||X^T U||_1`.
pub fn objective_f(x: &DataMatrix, u: &StiefelMatrix) -> Result<f64> {
    check_u(x, u)?;
    Ok(x.t_matmul(u.as_matrix())?.l1_norm())
}

/// `<X^T U, S>`.
pub fn objective_bilinear(x: &DataMatrix, u: &StiefelMatrix, s: &SignMatrix) -> Result<f64> {
    check_u(x, u)?;
    let v = x.t_matmul(u.as_matrix())?;
    bilinear_with(&v, s)
}

/// `<V, S>` summed in row-major order. With `S = sgn(V)` the result is
/// bitwise equal to `V.l1_norm()`.
pub(crate) fn bilinear_with(v: &DenseMatrix, s: &SignMatrix) -> Result<f64> {
    if v.shape() != (s.rows(), s.cols()) {
        return Err(shape_err(format!(
            "X^T U is {:?} but S is {}x{}",
            v.shape(),
            s.rows(),
            s.cols()
        )));
    }
    let mut acc = 0.0;
    for (a, &b) in v.as_slice().iter().zip(s.as_slice()) {
        match b {
            1 => acc += a,
            -1 => acc -= a,
            _ => {}
        }
    }
    Ok(acc)
}

fn degenerate(step: usize) -> L1PcaError {
    L1PcaError::DegenerateIterate { step, partial: None }
}

/// `sgn(tau * S + V)`.
fn prox_sign(tau: f64, s: &SignMatrix, v: &DenseMatrix) -> SignMatrix {
    let data: Vec<f64> = s.as_slice().iter().zip(v.as_slice()).map(|(&si, &vi)| tau * f64::from(si) + vi).collect();
    sgn_unchecked(&DenseMatrix::from_parts(v.rows(), v.cols(), data))
}

pub(crate) fn registered_pd(x: &DataMatrix, s: &SignMatrix, reg: &mut PdRegistry, step: usize) -> Result<StiefelMatrix> {
    let c = x_times_sign(x, s)?;
    if c.is_zero() {
        return Err(degenerate(step));
    }
    polar_u_registered(&c, s, reg)
}

/// One fixed-point step: `S = sgn(X^T U)`, `U+ = PD(X S)`. Returns `(U+, S)`.
pub fn nga_step(x: &DataMatrix, u: &StiefelMatrix, reg: &mut PdRegistry) -> Result<(StiefelMatrix, SignMatrix)> {
    check_u(x, u)?;
    let s = sgn_unchecked(&x.t_matmul(u.as_matrix())?);
    let next = registered_pd(x, &s, reg, 1)?;
    Ok((next, s))
}

/// `U^{k+1} = PD(X S^k)`, `S^{k+1} = sgn(tau S^k + X^T U^{k+1})`.
pub fn spnga_step(x: &DataMatrix, state: &SolverState, tau: f64, reg: &mut PdRegistry) -> Result<SolverState> {
    check_u(x, &state.u)?;
    let u = registered_pd(x, &state.s, reg, state.k + 1)?;
    let v = x.t_matmul(u.as_matrix())?;
    let s = prox_sign(tau, &state.s, &v);
    Ok(SolverState { e: u.as_matrix().clone(), u_prev: state.u.clone(), u, s, k: state.k + 1 })
}

/// `E^{k+1} = U^{k+1} - gamma (U^k - U^{k+1})`.
pub(crate) fn extrapolate(u_next: &StiefelMatrix, u: &StiefelMatrix, gamma: f64) -> Result<DenseMatrix> {
    if gamma == 0.0 {
        return Ok(u_next.as_matrix().clone());
    }
    let diff = u.as_matrix().sub(u_next.as_matrix())?;
    u_next.as_matrix().sub(&diff.scale(gamma))
}

/// Proximal alternating step with extrapolation:
/// `S^{k+1} = sgn(tau S^k + X^T E^k)`, `U^{k+1} = PD(beta U^k + X S^{k+1})`,
/// `E^{k+1} = U^{k+1} - gamma (U^k - U^{k+1})`.
///
/// The U-step input depends on the continuous iterate `U^k`, so no registry
/// is consulted.
pub fn pame_step(x: &DataMatrix, state: &SolverState, tau: f64, beta: f64, gamma: f64) -> Result<SolverState> {
    check_u(x, &state.u)?;
    let v = x.t_matmul(&state.e)?;
    let s = prox_sign(tau, &state.s, &v);
    let xs = x_times_sign(x, &s)?;
    let input = if beta == 0.0 { xs } else { state.u.as_matrix().axpy(beta, &xs)? };
    if input.is_zero() {
        return Err(degenerate(state.k + 1));
    }
    let u = polar_decompose(&input)?.u;
    let e = extrapolate(&u, &state.u, gamma)?;
    Ok(SolverState { u_prev: state.u.clone(), u, s, e, k: state.k + 1 })
}

/// PAMe with `beta = 0`; the U-step input is `X S^{k+1}` and goes through
/// the registry.
pub fn spame_step(x: &DataMatrix, state: &SolverState, tau: f64, gamma: f64, reg: &mut PdRegistry) -> Result<SolverState> {
    check_u(x, &state.u)?;
    let v = x.t_matmul(&state.e)?;
    let s = prox_sign(tau, &state.s, &v);
    let u = registered_pd(x, &s, reg, state.k + 1)?;
    let e = extrapolate(&u, &state.u, gamma)?;
    Ok(SolverState { u_prev: state.u.clone(), u, s, e, k: state.k + 1 })
}
