use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, shape_err, L1PcaError, Result};
use crate::polar_core::{polar_decompose, sym_eigen, DataMatrix, DenseMatrix, StiefelMatrix};

#[derive(Clone, Copy, Debug)]
pub enum InitScheme<'a> {
    /// Polar projection of a seeded Gaussian matrix.
    RandomStiefel,
    /// `e_1, ..., e_K`.
    FirstColumns,
    /// Top-K left singular vectors of the data.
    SvdWarmStart(&'a DataMatrix),
}

/// Scheme name without the data payload, for flags and configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitKind {
    Random,
    First,
    Svd,
}

impl InitKind {
    pub fn scheme(self, x: &DataMatrix) -> InitScheme<'_> {
        match self {
            InitKind::Random => InitScheme::RandomStiefel,
            InitKind::First => InitScheme::FirstColumns,
            InitKind::Svd => InitScheme::SvdWarmStart(x),
        }
    }
}

impl FromStr for InitKind {
    type Err = L1PcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(InitKind::Random),
            "first" => Ok(InitKind::First),
            "svd" => Ok(InitKind::Svd),
            other => Err(invalid(format!("unknown init scheme '{other}' (random, first, svd)"))),
        }
    }
}

impl fmt::Display for InitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            InitKind::Random => "random",
            InitKind::First => "first",
            InitKind::Svd => "svd",
        })
    }
}

pub fn init_u(d: usize, k: usize, seed: u64, scheme: InitScheme<'_>) -> Result<StiefelMatrix> {
    if d < k || k == 0 {
        return Err(shape_err(format!("need d >= K >= 1, got d={d}, K={k}")));
    }
    match scheme {
        InitScheme::FirstColumns => StiefelMatrix::first_columns(d, k),
        InitScheme::RandomStiefel => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            loop {
                let g = DenseMatrix::from_fn(d, k, |_, _| StandardNormal.sample(&mut rng))?;
                let pd = polar_decompose(&g)?;
                if pd.is_full_rank() {
                    return Ok(pd.u);
                }
            }
        }
        InitScheme::SvdWarmStart(x) => {
            if x.rows() != d {
                return Err(shape_err(format!("data has {} rows, expected d={d}", x.rows())));
            }
            let gram = x.matmul(&x.transpose())?;
            let eig = sym_eigen(&gram)?;
            let cols: Vec<usize> = (0..k).map(|j| d - 1 - j).collect();
            let mut top = eig.vectors.select_columns(&cols)?;
            let flips: Vec<f64> = (0..k)
                .map(|j| {
                    let c = top.column(j);
                    let lead = c.iter().enumerate().fold(0, |b, (i, v)| if v.abs() > c[b].abs() { i } else { b });
                    if c[lead] < 0.0 {
                        -1.0
                    } else {
                        1.0
                    }
                })
                .collect();
            top = top.scale_columns(&flips)?;
            // Re-project to remove the eigen-solver's rounding drift.
            Ok(polar_decompose(&top)?.u)
        }
    }
}
