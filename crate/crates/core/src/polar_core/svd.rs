//! One-sided Jacobi SVD and a cyclic Jacobi symmetric eigensolver.
//!
//! Both use a fixed cyclic pair order, so identical input bits give
//! identical output bits.

use crate::error::{shape_err, Result};
use crate::polar_core::dense::{DenseMatrix, StiefelMatrix};

/// Singular values at or below `RANK_RTOL * sigma_1` count as zero.
pub const RANK_RTOL: f64 = 1e-10;

const ORTH_RTOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Compact SVD `C = P diag(sigma) Q^T` of an `m x n` matrix with `m >= n`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub p: StiefelMatrix,
    pub sigma: Vec<f64>,
    pub q: DenseMatrix,
}

impl Svd {
    /// Numerical rank under [`RANK_RTOL`].
    pub fn rank(&self) -> usize {
        rank_of(&self.sigma)
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let ps = self
            .p
            .as_matrix()
            .scale_columns(&self.sigma)
            .expect("sigma has one entry per column");
        ps.matmul(&self.q.transpose()).expect("conformal")
    }
}

pub(crate) fn rank_of(sigma: &[f64]) -> usize {
    let s1 = sigma.first().copied().unwrap_or(0.0);
    if s1 <= 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > RANK_RTOL * s1).count()
}

/// Column-major working copy of the matrix.
fn columns_of(c: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..c.cols()).map(|j| c.column(j)).collect()
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn rotate(a: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = a.split_at_mut(q);
    let (ap, aq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in ap.iter_mut().zip(aq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Orthogonalises the columns of `a` in place; accumulates rotations into
/// `v` when given. Returns the number of sweeps used.
fn hestenes(a: &mut [Vec<f64>], mut v: Option<&mut [Vec<f64>]>) -> usize {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    let tol = ORTH_RTOL.max(m as f64 * f64::EPSILON);
    for sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate(a, p, q, c, s);
                if let Some(v) = v.as_deref_mut() {
                    rotate(v, p, q, c, s);
                }
            }
        }
        if !rotated {
            return sweep + 1;
        }
    }
    MAX_SWEEPS
}

/// Singular values only, descending. Bitwise equal to `compact_svd(c).sigma`.
pub fn singular_values(c: &DenseMatrix) -> Result<Vec<f64>> {
    if c.rows() < c.cols() {
        return Err(shape_err(format!(
            "SVD needs rows >= cols, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    let mut a = columns_of(c);
    hestenes(&mut a, None);
    let mut sigma: Vec<f64> = a.iter().map(|col| dot(col, col).sqrt()).collect();
    sigma.sort_by(|x, y| y.total_cmp(x));
    zero_below_threshold(&mut sigma);
    Ok(sigma)
}

fn zero_below_threshold(sigma: &mut [f64]) {
    let s1 = sigma.first().copied().unwrap_or(0.0);
    for s in sigma.iter_mut() {
        if *s <= RANK_RTOL * s1 {
            *s = 0.0;
        }
    }
}

/// Sum of singular values.
pub fn nuclear_norm(c: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(c)?.iter().sum())
}

/// Largest singular value, for either orientation.
pub fn spectral_norm(c: &DenseMatrix) -> f64 {
    let sv = if c.rows() >= c.cols() {
        singular_values(c)
    } else {
        singular_values(&c.transpose())
    };
    sv.expect("orientation handled").first().copied().unwrap_or(0.0)
}

/// Deterministic compact SVD.
///
/// Right singular vectors are sign-normalised so their largest-magnitude
/// entry is positive (lowest index on ties). Singular values at or below
/// the rank threshold are set to zero and their left vectors are replaced
/// by a Gram-Schmidt completion against `e_1, e_2, ...`.
pub fn compact_svd(c: &DenseMatrix) -> Result<Svd> {
    let (m, n) = c.shape();
    if m < n {
        return Err(shape_err(format!("SVD needs rows >= cols, got {m}x{n}")));
    }
    let mut a = columns_of(c);
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    hestenes(&mut a, Some(&mut v));

    let norms: Vec<f64> = a.iter().map(|col| dot(col, col).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let mut sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    zero_below_threshold(&mut sigma);
    let rank = sigma.iter().filter(|&&s| s > 0.0).count();

    let mut pcols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut qcols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (slot, &j) in order.iter().enumerate() {
        let mut qj = v[j].clone();
        let mut pj = if slot < rank {
            a[j].iter().map(|x| x / norms[j]).collect()
        } else {
            Vec::new()
        };
        let lead = largest_magnitude_index(&qj);
        if qj[lead] < 0.0 {
            qj.iter_mut().for_each(|x| *x = -*x);
            pj.iter_mut().for_each(|x| *x = -*x);
        }
        pcols.push(pj);
        qcols.push(qj);
    }
    for slot in rank..n {
        let fill = complete_basis(&pcols[..slot], m);
        pcols[slot] = fill;
    }

    let p = DenseMatrix::from_parts(m, n, interleave(&pcols, m));
    let q = DenseMatrix::from_parts(n, n, interleave(&qcols, n));
    Ok(Svd { p: StiefelMatrix::from_trusted(p), sigma, q })
}

fn largest_magnitude_index(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

/// Row-major data from a list of columns.
fn interleave(cols: &[Vec<f64>], rows: usize) -> Vec<f64> {
    let mut data = Vec::with_capacity(rows * cols.len());
    for i in 0..rows {
        for col in cols {
            data.push(col[i]);
        }
    }
    data
}

/// First canonical vector with a usable component orthogonal to `basis`,
/// orthogonalised twice and normalised.
fn complete_basis(basis: &[Vec<f64>], m: usize) -> Vec<f64> {
    let accept = 0.5 / (m as f64).sqrt();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for i in 0..m {
        let mut w = vec![0.0; m];
        w[i] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let proj = dot(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= proj * y;
                }
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm >= accept {
            return w.into_iter().map(|x| x / norm).collect();
        }
        if best.as_ref().is_none_or(|(bn, _)| norm > *bn) {
            best = Some((norm, w));
        }
    }
    // Unreachable for a proper subset of an orthonormal basis; kept total.
    let (norm, w) = best.expect("m >= 1");
    w.into_iter().map(|x| x / norm).collect()
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are returned ascending with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

pub fn sym_eigen(a: &DenseMatrix) -> Result<SymEigen> {
    let n = a.rows();
    if a.cols() != n {
        return Err(shape_err("eigendecomposition needs a square matrix"));
    }
    let s = a.symmetrize()?;
    let mut m: Vec<f64> = s.as_slice().to_vec();
    let mut v = DenseMatrix::eye(n, n).into_vec();
    let scale = s.frobenius_norm();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let sn = c * t;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - sn * mkq;
                    m[k * n + q] = sn * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - sn * mqk;
                    m[q * n + k] = sn * mpk + c * mqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - sn * vkq;
                    v[k * n + q] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[x * n + x].total_cmp(&m[y * n + y]));
    let values = order.iter().map(|&j| m[j * n + j]).collect();
    let vectors = DenseMatrix::from_parts(
        n,
        n,
        (0..n).flat_map(|i| order.iter().map(move |&j| (i, j))).map(|(i, j)| v[i * n + j]).collect(),
    );
    Ok(SymEigen { values, vectors })
}

/// Smallest eigenvalue of `(A + A^T)/2`.
pub fn min_eigenvalue(a: &DenseMatrix) -> Result<f64> {
    Ok(sym_eigen(a)?.values.first().copied().unwrap_or(0.0))
}
