use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Result};
use crate::polar_core::dense::{DenseMatrix, StiefelMatrix};
use crate::polar_core::svd::{compact_svd, min_eigenvalue};

/// `C = U H` with `U` orthonormal-column and `H` symmetric PSD.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarFactors {
    pub u: StiefelMatrix,
    pub h: DenseMatrix,
    /// Smallest eigenvalue of `h`, i.e. the smallest singular value of `C`.
    pub lambda_min: f64,
    /// Numerical rank of `C`.
    pub rank: usize,
}

impl PolarFactors {
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.u.k()
    }
}

/// Polar decomposition through the compact SVD: `U = P Q^T`, `H = Q S Q^T`.
///
/// For rank-deficient `C` the U-factor is not unique; the one returned is
/// the one induced by the canonical completion in [`compact_svd`].
pub fn polar_decompose(c: &DenseMatrix) -> Result<PolarFactors> {
    let (m, n) = c.shape();
    if m < n {
        return Err(shape_err(format!("polar decomposition needs rows >= cols, got {m}x{n}")));
    }
    let svd = compact_svd(c)?;
    let rank = svd.rank();
    let qt = svd.q.transpose();
    let u = svd.p.as_matrix().matmul(&qt)?;
    let h = svd.q.scale_columns(&svd.sigma)?.matmul(&qt)?.symmetrize()?;
    let lambda_min = svd.sigma.last().copied().unwrap_or(0.0);
    Ok(PolarFactors { u: StiefelMatrix::from_trusted(u), h, lambda_min, rank })
}

/// Smallest singular value of `a` above the rank threshold, if any.
pub fn sigma_plus_min(a: &DenseMatrix) -> Result<Option<f64>> {
    let sv = if a.rows() >= a.cols() {
        crate::polar_core::svd::singular_values(a)?
    } else {
        crate::polar_core::svd::singular_values(&a.transpose())?
    };
    Ok(sv.into_iter().rev().find(|&s| s > 0.0))
}

/// Shrinkage check: if `u` is a U-factor of `tau*u + a` and `tau` is below
/// the smallest positive singular value of `a`, then `u` is also a U-factor
/// of `a`. Returns false when the hypothesis `tau < sigma_min^+(a)` fails,
/// otherwise whether `a = u H'` with `H'` symmetric PSD (tolerance 1e-9).
pub fn shrink_check(a: &DenseMatrix, u: &StiefelMatrix, tau: f64) -> bool {
    if a.shape() != u.as_matrix().shape() || tau <= 0.0 {
        return false;
    }
    let Ok(Some(smin)) = sigma_plus_min(a) else {
        return false;
    };
    if tau >= smin {
        return false;
    }
    let um = u.as_matrix();
    let Ok(h) = um.t_matmul(a).and_then(|g| g.symmetrize()) else {
        return false;
    };
    let tol = 1e-9 * a.frobenius_norm().max(1.0);
    let residual = um.matmul(&h).and_then(|uh| a.sub(&uh)).map(|r| r.frobenius_norm());
    let lmin = min_eigenvalue(&h);
    matches!((residual, lmin), (Ok(r), Ok(l)) if r <= tol && l >= -tol)
}
