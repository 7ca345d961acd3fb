//! Exhaustive ground truth for small instances.
//!
//! `F^max = max_S ||X S||_*` over `S in {+-1}^{n x K}`: for fixed `S` the
//! best `U` is the polar factor of `X S` and attains the nuclear norm.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, shape_err, L1PcaError, Result};
use crate::optimality::default_zero_tol;
use crate::polar_core::{
    nuclear_norm, polar_decompose, spectral_norm, x_times_sign, DataMatrix, SignMatrix, StiefelMatrix,
};
pub use crate::trace::{step_bound, BoundKind};

/// Default cap on sign matrices enumerated by [`brute_force_fmax`].
pub const FMAX_DEFAULT_LIMIT: u128 = 1 << 24;
/// Default cap on sign matrices enumerated by [`tau_star`] (`3^15`).
pub const TAU_STAR_DEFAULT_LIMIT: u128 = 14_348_907;

const CHUNK: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub f_max: f64,
    pub s_star: SignMatrix,
    pub u_star: StiefelMatrix,
    pub enumerated: u64,
}

fn count_or_too_large(base: u128, exp: usize, limit: u128) -> Result<u64> {
    let mut count: u128 = 1;
    for _ in 0..exp {
        count = count.saturating_mul(base);
        if count > limit {
            return Err(L1PcaError::TooLarge { count, limit });
        }
    }
    u64::try_from(count).map_err(|_| L1PcaError::TooLarge { count, limit })
}

/// The `t`-th matrix of `{+-1}^{n x K}` in lexicographic order with
/// `+1` before `-1`, entries in row-major order, most significant first.
pub fn sign_matrix_from_index(t: u64, n: usize, k: usize) -> SignMatrix {
    let nk = n * k;
    let data = (0..nk).map(|e| if (t >> (nk - 1 - e)) & 1 == 1 { -1 } else { 1 }).collect();
    SignMatrix::from_parts(n, k, data)
}

/// The `t`-th matrix of `{-1, 0, +1}^{n x K}` in lexicographic order.
pub fn ternary_matrix_from_index(mut t: u64, n: usize, k: usize) -> SignMatrix {
    let nk = n * k;
    let mut data = vec![0i8; nk];
    for e in (0..nk).rev() {
        data[e] = (t % 3) as i8 - 1;
        t /= 3;
    }
    SignMatrix::from_parts(n, k, data)
}

fn check_dims(x: &DataMatrix, k: usize) -> Result<()> {
    if k == 0 || x.rows() < k {
        return Err(shape_err(format!("need d >= K >= 1, got d={}, K={k}", x.rows())));
    }
    Ok(())
}

/// Global maximum of `||X^T U||_1` by enumeration of `{+-1}^{n x K}`.
/// Ties go to the lexicographically smallest sign matrix.
pub fn brute_force_fmax(x: &DataMatrix, k: usize, limit: u128) -> Result<OracleResult> {
    check_dims(x, k)?;
    let n = x.cols();
    let total = count_or_too_large(2, n * k, limit)?;
    let chunks = total.div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<(f64, u64)> {
            let mut best = (f64::NEG_INFINITY, u64::MAX);
            for t in (c * CHUNK)..((c + 1) * CHUNK).min(total) {
                let s = sign_matrix_from_index(t, n, k);
                let v = nuclear_norm(&x_times_sign(x, &s)?)?;
                if v > best.0 {
                    best = (v, t);
                }
            }
            Ok(best)
        })
        .try_reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;
    let s_star = sign_matrix_from_index(best.1, n, k);
    let u_star = polar_decompose(&x_times_sign(x, &s_star)?)?.u;
    Ok(OracleResult { f_max: best.0, s_star, u_star, enumerated: total })
}

fn min_nonzero_abs(values: &[f64], zero_tol: f64) -> Option<f64> {
    values.iter().map(|v| v.abs()).filter(|&a| a > zero_tol).min_by(f64::total_cmp)
}

/// Smallest nonzero `|x_i^T u_j|` over the given iterates.
pub fn tau0_from_trace(x: &DataMatrix, visited_u: &[StiefelMatrix]) -> Result<f64> {
    if visited_u.is_empty() {
        return Err(invalid("tau0 needs at least one iterate"));
    }
    let zero_tol = default_zero_tol(x);
    let mut best: Option<f64> = None;
    for u in visited_u {
        if let Some(m) = min_nonzero_abs(x.t_matmul(u.as_matrix())?.as_slice(), zero_tol) {
            best = Some(best.map_or(m, |b| b.min(m)));
        }
    }
    best.ok_or_else(|| L1PcaError::DegenerateInstance("every projection x_i^T u_j is zero".into()))
}

/// Smallest nonzero `|x_i^T u_j|` over every `U = PD(X S)` with
/// `S in {0, +-1}^{n x K}` and `X S != 0`.
pub fn tau_star(x: &DataMatrix, k: usize, limit: u128) -> Result<f64> {
    check_dims(x, k)?;
    let n = x.cols();
    let total = count_or_too_large(3, n * k, limit)?;
    let zero_tol = default_zero_tol(x);
    let chunks = total.div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Option<f64>> {
            let mut best: Option<f64> = None;
            for t in (c * CHUNK)..((c + 1) * CHUNK).min(total) {
                let s = ternary_matrix_from_index(t, n, k);
                let xs = x_times_sign(x, &s)?;
                if xs.is_zero() {
                    continue;
                }
                let u = polar_decompose(&xs)?.u;
                if let Some(m) = min_nonzero_abs(x.t_matmul(u.as_matrix())?.as_slice(), zero_tol) {
                    best = Some(best.map_or(m, |b| b.min(m)));
                }
            }
            Ok(best)
        })
        .try_reduce(
            || None,
            |a, b| {
                Ok(match (a, b) {
                    (Some(p), Some(q)) => Some(p.min(q)),
                    (p, q) => p.or(q),
                })
            },
        )?;
    best.ok_or_else(|| L1PcaError::DegenerateInstance("X is zero".into()))
}

/// `min(1, b * tau / ||X||_2^2)`.
pub fn gamma_threshold(x: &DataMatrix, tau: f64, beta_or_lambda: f64) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    if !(beta_or_lambda.is_finite() && beta_or_lambda >= 0.0) {
        return Err(invalid(format!("weight must be >= 0, got {beta_or_lambda}")));
    }
    let norm = spectral_norm(x);
    if norm == 0.0 {
        return Ok(1.0);
    }
    Ok((beta_or_lambda * tau / (norm * norm)).min(1.0))
}
