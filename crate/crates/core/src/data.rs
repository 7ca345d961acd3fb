//! Synthetic instances and CSV I/O.
//!
//! CSV files hold one sample per row, so a file with `n` rows and `d`
//! columns loads as the `d x n` matrix `X` whose columns are the samples.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, L1PcaError, Result};
use crate::polar_core::{DataMatrix, DenseMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub d: usize,
    pub n: usize,
    pub outlier_fraction: f64,
    pub outlier_scale: f64,
    pub noise_std: f64,
    pub latent_rank: usize,
    pub seed: u64,
    pub centered: bool,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        Self {
            d: 5,
            n: 8,
            outlier_fraction: 0.1,
            outlier_scale: 10.0,
            noise_std: 0.1,
            latent_rank: 2,
            seed: 0,
            centered: false,
        }
    }
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 {
            return Err(invalid("d and n must be positive"));
        }
        if !(0.0..=1.0).contains(&self.outlier_fraction) {
            return Err(invalid(format!("outlier_fraction must lie in [0, 1], got {}", self.outlier_fraction)));
        }
        if !(self.outlier_scale.is_finite() && self.outlier_scale > 1.0) {
            return Err(invalid(format!("outlier_scale must be finite and > 1, got {}", self.outlier_scale)));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(invalid(format!("noise_std must be finite and >= 0, got {}", self.noise_std)));
        }
        if self.latent_rank > self.d {
            return Err(invalid(format!("latent_rank {} exceeds d = {}", self.latent_rank, self.d)));
        }
        Ok(())
    }
}

/// `x_i = A z_i + e_i` with Gaussian `A`, `z_i` and noise `e_i`; a
/// `floor(outlier_fraction * n)` subset of columns is replaced by
/// `outlier_scale * g1 / g2` entrywise (ratio of standard normals).
pub fn generate(spec: &InstanceSpec) -> Result<DataMatrix> {
    spec.validate()?;
    let (d, n, r) = (spec.d, spec.n, spec.latent_rank);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let a: Vec<f64> = (0..d * r).map(|_| StandardNormal.sample(&mut rng)).collect();
    let noise = Normal::new(0.0, spec.noise_std).map_err(|e| invalid(e.to_string()))?;

    // Column-major scratch: samples are contiguous.
    let mut cols = vec![0.0; d * n];
    for i in 0..n {
        let z: Vec<f64> = (0..r).map(|_| StandardNormal.sample(&mut rng)).collect();
        for row in 0..d {
            let signal: f64 = (0..r).map(|j| a[row * r + j] * z[j]).sum();
            cols[i * d + row] = signal + noise.sample(&mut rng);
        }
    }
    let n_out = (spec.outlier_fraction * n as f64).floor() as usize;
    let mut outliers = sample(&mut rng, n, n_out.min(n)).into_vec();
    outliers.sort_unstable();
    for i in outliers {
        for row in 0..d {
            let g1: f64 = StandardNormal.sample(&mut rng);
            let g2: f64 = StandardNormal.sample(&mut rng);
            cols[i * d + row] = spec.outlier_scale * g1 / g2;
        }
    }
    let x = DenseMatrix::from_fn(d, n, |row, i| cols[i * d + row])?;
    if spec.centered {
        center(&x)
    } else {
        Ok(x)
    }
}

/// Subtracts the mean sample from every column.
pub fn center(x: &DataMatrix) -> Result<DataMatrix> {
    let n = x.cols() as f64;
    let means: Vec<f64> = (0..x.rows()).map(|r| x.row(r).iter().sum::<f64>() / n).collect();
    DenseMatrix::from_fn(x.rows(), x.cols(), |r, c| x.get(r, c) - means[r])
}

fn parse_err(row: usize, col: usize, msg: impl Into<String>) -> L1PcaError {
    L1PcaError::Parse { row, col, msg: msg.into() }
}

/// Parses samples-as-rows CSV text. Row and column numbers in errors are
/// 1-based and count the header line when present.
pub fn parse_csv<R: Read>(reader: R, has_header: bool) -> Result<DataMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let offset = usize::from(has_header) + 1;
    let mut samples: Vec<Vec<f64>> = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let line = idx + offset;
        let rec = rec.map_err(|e| parse_err(line, 0, e.to_string()))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(rec.len());
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(line, j + 1, format!("'{cell}' is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(line, j + 1, format!("'{cell}' is not finite")));
            }
            row.push(v);
        }
        if let Some(first) = samples.first() {
            if row.len() != first.len() {
                return Err(parse_err(
                    line,
                    row.len().min(first.len()) + 1,
                    format!("expected {} fields, found {}", first.len(), row.len()),
                ));
            }
        }
        samples.push(row);
    }
    if samples.is_empty() {
        return Err(parse_err(offset, 0, "no data rows"));
    }
    let d = samples[0].len();
    DenseMatrix::from_fn(d, samples.len(), |r, c| samples[c][r])
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<DataMatrix> {
    load_csv_with_header(path, false)
}

pub fn load_csv_with_header(path: impl AsRef<Path>, has_header: bool) -> Result<DataMatrix> {
    parse_csv(File::open(path)?, has_header)
}

/// Writes one sample per row using shortest round-trip formatting.
pub fn write_csv<W: Write>(x: &DataMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for i in 0..x.cols() {
        let row: Vec<String> = (0..x.rows()).map(|r| x.get(r, i).to_string()).collect();
        w.write_record(&row).map_err(|e| L1PcaError::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(x: &DataMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_csv(x, File::create(path)?)
}
