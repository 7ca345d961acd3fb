//! Polar decomposition of a small matrix and the registry that caches it.

use l1pca::polar_core::{compact_svd, polar_decompose, polar_u_registered, sgn_matrix, PdRegistry};
use l1pca::prelude::*;

fn main() -> l1pca::Result<()> {
    let c = DenseMatrix::from_rows(&[[2.0, 0.5], [1.0, -1.0], [0.0, 3.0]])?;
    let svd = compact_svd(&c)?;
    println!("singular values: {:?}", svd.sigma);

    let pd = polar_decompose(&c)?;
    println!("U =\n{:?}", pd.u.as_matrix());
    println!("lambda_min(H) = {}, rank = {}", pd.lambda_min, pd.rank);
    let back = pd.u.as_matrix().matmul(&pd.h)?;
    println!("||C - U H||_F = {:e}", back.sub(&c)?.frobenius_norm());

    // Same key twice: one decomposition, one cache hit.
    let key = sgn_matrix(&c)?;
    let mut reg = PdRegistry::new();
    let a = polar_u_registered(&c, &key, &mut reg)?;
    let b = polar_u_registered(&c, &key, &mut reg)?;
    assert!(a.bits_eq(&b));
    println!("registry: {} entries, {} hits, {} misses", reg.len(), reg.hits(), reg.misses());
    Ok(())
}
