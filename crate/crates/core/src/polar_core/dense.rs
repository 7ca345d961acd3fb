//! Dense row-major matrices plus the two constrained matrix kinds the
//! solvers pass around: orthonormal-column (Stiefel) matrices and sign
//! matrices with entries in {-1, 0, +1}.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, shape_err, L1PcaError, Result};

/// Real matrix stored row-major. All entries are finite.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// The d x n sample matrix; columns are samples.
pub type DataMatrix = DenseMatrix;

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<RawMatrix> for DenseMatrix {
    type Error = L1PcaError;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        DenseMatrix::new(raw.rows, raw.cols, raw.data)
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_err(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds from a slice of equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != c {
                return Err(shape_err(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    pub fn from_column(col: &[f64]) -> Result<Self> {
        Self::new(col.len(), 1, col.to_vec())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// The first `cols` canonical basis vectors of R^rows, as columns.
    pub fn eye(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            m.data[i * cols + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// Internal constructor for values produced by arithmetic on finite inputs.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self::from_parts(self.cols, self.rows, data)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(shape_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * other.cols..(i + 1) * other.cols];
            for p in 0..self.cols {
                let a = self.get(i, p);
                if a == 0.0 {
                    continue;
                }
                let brow = other.row(p);
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Self::from_parts(self.rows, other.cols, out))
    }

    /// `self^T * other` without materialising the transpose.
    pub fn t_matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows {
            return Err(shape_err(format!(
                "cannot form A^T B with A {}x{} and B {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (m, n) = (self.cols, other.cols);
        let mut out = vec![0.0; m * n];
        for r in 0..self.rows {
            let arow = self.row(r);
            let brow = other.row(r);
            for (i, a) in arow.iter().enumerate() {
                if *a == 0.0 {
                    continue;
                }
                let orow = &mut out[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Self::from_parts(m, n, out))
    }

    fn check_same_shape(&self, other: &DenseMatrix, op: &str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(shape_err(format!(
                "{op}: shapes {:?} and {:?} differ",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other, "add")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self::from_parts(self.rows, self.cols, data))
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other, "sub")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self::from_parts(self.rows, self.cols, data))
    }

    pub fn scale(&self, alpha: f64) -> DenseMatrix {
        Self::from_parts(self.rows, self.cols, self.data.iter().map(|v| alpha * v).collect())
    }

    /// `alpha * self + other`.
    pub fn axpy(&self, alpha: f64, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other, "axpy")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| alpha * a + b).collect();
        Ok(Self::from_parts(self.rows, self.cols, data))
    }

    /// Frobenius inner product.
    pub fn inner(&self, other: &DenseMatrix) -> Result<f64> {
        self.check_same_shape(other, "inner")?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Entrywise L1 norm.
    pub fn l1_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc + v.abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }

    /// `(A + A^T) / 2` for a square matrix.
    pub fn symmetrize(&self) -> Result<DenseMatrix> {
        if self.rows != self.cols {
            return Err(shape_err("symmetrize needs a square matrix"));
        }
        let n = self.rows;
        let mut out = self.data.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.get(i, j) + self.get(j, i));
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        Ok(Self::from_parts(n, n, out))
    }

    /// Euclidean norms of the columns.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (a, v) in acc.iter_mut().zip(self.row(i)) {
                *a += v * v;
            }
        }
        acc.into_iter().map(f64::sqrt).collect()
    }

    /// Multiplies column `j` by `signs[j]` (each +/-1).
    pub fn scale_columns(&self, factors: &[f64]) -> Result<DenseMatrix> {
        if factors.len() != self.cols {
            return Err(shape_err("scale_columns: one factor per column required"));
        }
        let mut out = self.data.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[i * self.cols + j] *= factors[j];
            }
        }
        Ok(Self::from_parts(self.rows, self.cols, out))
    }

    /// Selects the listed columns, in order.
    pub fn select_columns(&self, idx: &[usize]) -> Result<DenseMatrix> {
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.cols) {
            return Err(shape_err(format!("column {bad} out of range")));
        }
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        Ok(Self::from_parts(self.rows, idx.len(), data))
    }

    /// Bitwise equality of shape and entries (distinguishes -0.0 from 0.0).
    pub fn bits_eq(&self, other: &DenseMatrix) -> bool {
        self.shape() == other.shape()
            && self.data.iter().zip(&other.data).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// A d x K matrix with orthonormal columns.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DenseMatrix", into = "DenseMatrix")]
pub struct StiefelMatrix(DenseMatrix);

impl StiefelMatrix {
    /// Accepts `m` if `||m^T m - I||_F <= 1e-12 * K`.
    pub fn new(m: DenseMatrix) -> Result<Self> {
        if m.rows() < m.cols() {
            return Err(shape_err(format!(
                "Stiefel matrix needs rows >= cols, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let residual = orthonormality_residual(&m);
        if residual > 1e-12 * (m.cols().max(1) as f64) {
            return Err(L1PcaError::NotOrthonormal { residual });
        }
        Ok(Self(m))
    }

    /// Wraps factors produced by the polar kernel, whose orthonormality is
    /// established by construction.
    pub(crate) fn from_trusted(m: DenseMatrix) -> Self {
        debug_assert!(orthonormality_residual(&m) <= 1e-10 * (m.cols().max(1) as f64));
        Self(m)
    }

    /// First `k` canonical basis vectors of R^d.
    pub fn first_columns(d: usize, k: usize) -> Result<Self> {
        if d < k {
            return Err(shape_err(format!("need d >= K, got d={d}, K={k}")));
        }
        Ok(Self(DenseMatrix::eye(d, k)))
    }

    pub fn as_matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }

    pub fn d(&self) -> usize {
        self.0.rows()
    }

    pub fn k(&self) -> usize {
        self.0.cols()
    }

    pub fn bits_eq(&self, other: &StiefelMatrix) -> bool {
        self.0.bits_eq(&other.0)
    }

    pub fn distance(&self, other: &StiefelMatrix) -> Result<f64> {
        Ok(self.0.sub(&other.0)?.frobenius_norm())
    }
}

impl TryFrom<DenseMatrix> for StiefelMatrix {
    type Error = L1PcaError;

    fn try_from(m: DenseMatrix) -> Result<Self> {
        StiefelMatrix::new(m)
    }
}

impl From<StiefelMatrix> for DenseMatrix {
    fn from(u: StiefelMatrix) -> Self {
        u.0
    }
}

impl AsRef<DenseMatrix> for StiefelMatrix {
    fn as_ref(&self) -> &DenseMatrix {
        &self.0
    }
}

impl fmt::Debug for StiefelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Stiefel{:?}", self.0)
    }
}

/// `||M^T M - I||_F`.
pub fn orthonormality_residual(m: &DenseMatrix) -> f64 {
    let g = m.t_matmul(m).expect("same matrix");
    let n = g.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let t = g.get(i, j) - if i == j { 1.0 } else { 0.0 };
            acc += t * t;
        }
    }
    acc.sqrt()
}

/// An n x K matrix with entries in {-1, 0, +1}.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSign")]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

#[derive(Deserialize)]
struct RawSign {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl TryFrom<RawSign> for SignMatrix {
    type Error = L1PcaError;

    fn try_from(raw: RawSign) -> Result<Self> {
        SignMatrix::new(raw.rows, raw.cols, raw.data)
    }
}

impl SignMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_err(format!(
                "expected {} sign entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !(-1..=1).contains(v)) {
            return Err(invalid("sign entries must be -1, 0 or +1"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<i8>) -> Self {
        debug_assert!(data.iter().all(|v| (-1..=1).contains(v)));
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.data
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_parts(self.rows, self.cols, self.data.iter().map(|&v| f64::from(v)).collect())
    }

    /// Returns a copy with entry `(i, j)` replaced.
    pub fn with_entry(&self, i: usize, j: usize, v: i8) -> Result<SignMatrix> {
        if !(-1..=1).contains(&v) {
            return Err(invalid("sign entries must be -1, 0 or +1"));
        }
        let mut data = self.data.clone();
        data[i * self.cols + j] = v;
        Ok(Self::from_parts(self.rows, self.cols, data))
    }

    pub fn neg(&self) -> SignMatrix {
        Self::from_parts(self.rows, self.cols, self.data.iter().map(|v| -v).collect())
    }

    /// Multiplies column `j` by `flips[j]` (each +/-1).
    pub fn flip_columns(&self, flips: &[i8]) -> Result<SignMatrix> {
        if flips.len() != self.cols {
            return Err(shape_err("flip_columns: one flip per column required"));
        }
        let mut data = self.data.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[i * self.cols + j] *= flips[j];
            }
        }
        Ok(Self::from_parts(self.rows, self.cols, data))
    }

    /// Squared Frobenius distance, computed exactly in integers.
    pub fn distance_sq(&self, other: &SignMatrix) -> u64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let d = i64::from(*a) - i64::from(*b);
                (d * d) as u64
            })
            .sum()
    }

    /// Canonical registry key: shape then entries, little-endian bytes.
    pub fn key_bytes(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(16 + self.data.len());
        key.extend_from_slice(&(self.rows as u64).to_le_bytes());
        key.extend_from_slice(&(self.cols as u64).to_le_bytes());
        key.extend(self.data.iter().map(|&v| v as u8));
        key
    }
}

impl fmt::Debug for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SignMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

/// Entrywise sign with bit-exact zero: `sgn(0.0) = sgn(-0.0) = 0`.
pub fn sgn_matrix(m: &DenseMatrix) -> Result<SignMatrix> {
    if let Some(pos) = m.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(invalid(format!("non-finite entry at flat index {pos}")));
    }
    Ok(sgn_unchecked(m))
}

pub(crate) fn sgn_unchecked(m: &DenseMatrix) -> SignMatrix {
    let data = m.as_slice().iter().map(|&v| sgn_scalar(v)).collect();
    SignMatrix::from_parts(m.rows(), m.cols(), data)
}

#[inline]
pub(crate) fn sgn_scalar(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// `X * S` using only additions and subtractions, so the product is a
/// deterministic function of the sign pattern.
pub fn x_times_sign(x: &DenseMatrix, s: &SignMatrix) -> Result<DenseMatrix> {
    if x.cols() != s.rows() {
        return Err(shape_err(format!(
            "X is {}x{} but S is {}x{}",
            x.rows(),
            x.cols(),
            s.rows(),
            s.cols()
        )));
    }
    let (d, n, k) = (x.rows(), x.cols(), s.cols());
    let mut out = vec![0.0; d * k];
    for r in 0..d {
        let xrow = x.row(r);
        let orow = &mut out[r * k..(r + 1) * k];
        for (i, &xv) in xrow.iter().enumerate().take(n) {
            for (j, o) in orow.iter_mut().enumerate() {
                match s.get(i, j) {
                    1 => *o += xv,
                    -1 => *o -= xv,
                    _ => {}
                }
            }
        }
    }
    Ok(DenseMatrix::from_parts(d, k, out))
}
