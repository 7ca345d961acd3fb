#![allow(dead_code)]

use l1pca::data::{generate, InstanceSpec};
use l1pca::polar_core::{DenseMatrix, StiefelMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DenseMatrix {
    let v: Vec<f64> = (0..m * n).map(|_| StandardNormal.sample(rng)).collect();
    DenseMatrix::new(m, n, v).unwrap()
}

/// `m x n` matrix of rank `r` as a product of Gaussian factors.
pub fn low_rank(rng: &mut ChaCha8Rng, m: usize, n: usize, r: usize) -> DenseMatrix {
    if r == 0 {
        return DenseMatrix::zeros(m, n);
    }
    gaussian(rng, m, r).matmul(&gaussian(rng, r, n)).unwrap()
}

/// Orthonormal columns by modified Gram-Schmidt on a Gaussian matrix, so
/// the result does not depend on the crate's own polar kernel.
pub fn random_stiefel(rng: &mut ChaCha8Rng, d: usize, k: usize) -> StiefelMatrix {
    loop {
        let g = gaussian(rng, d, k);
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut ok = true;
        for j in 0..k {
            let mut v = g.column(j);
            for _ in 0..2 {
                for q in &cols {
                    let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
                }
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|a| a / norm).collect());
        }
        if ok {
            let m = DenseMatrix::from_fn(d, k, |r, c| cols[c][r]).unwrap();
            return StiefelMatrix::new(m).unwrap();
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub x: DenseMatrix,
    pub k: usize,
    pub label: String,
}

/// Mixture of synthetic outlier instances and plain Gaussian / small
/// integer matrices with `n * K <= max_nk`.
pub fn instances(count: usize, max_d: usize, max_n: usize, max_k: usize, max_nk: usize, seed: u64) -> Vec<Instance> {
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let i = out.len();
        let d = rng.random_range(1..=max_d);
        let k = rng.random_range(1..=max_k.min(d));
        let n_cap = max_n.min(max_nk / k);
        if n_cap == 0 {
            continue;
        }
        let n = rng.random_range(1..=n_cap);
        let x = match i % 3 {
            0 => {
                let spec = InstanceSpec {
                    d,
                    n,
                    latent_rank: rng.random_range(0..=d),
                    outlier_fraction: 0.25,
                    seed: rng.random(),
                    ..InstanceSpec::default()
                };
                generate(&spec).unwrap()
            }
            1 => gaussian(&mut rng, d, n),
            _ => {
                let v = (0..d * n).map(|_| rng.random_range(-5i32..=5) as f64).collect();
                DenseMatrix::new(d, n, v).unwrap()
            }
        };
        if x.is_zero() {
            continue;
        }
        out.push(Instance { x, k, label: format!("#{i} d={d} n={n} k={k}") });
    }
    out
}
