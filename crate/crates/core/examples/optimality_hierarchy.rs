//! First-order, KKT and partial-maximizer certificates, including a point
//! that is KKT but not first-order stationary.

use l1pca::optimality::{certify, default_tol, default_zero_tol};
use l1pca::prelude::*;

fn show(label: &str, x: &DataMatrix, u: &StiefelMatrix, s: &SignMatrix) -> l1pca::Result<()> {
    let r = certify(x, u, s, default_tol(x), default_zero_tol(x))?;
    println!(
        "{label:<12} subgrad={} kkt={} foc={} partial_max={} residual={:.2e} h_min={:.3}",
        r.is_subgrad_member, r.is_kkt, r.is_foc, r.is_partial_max, r.kkt_residual, r.h_min_eig
    );
    Ok(())
}

fn main() -> l1pca::Result<()> {
    let x = DenseMatrix::eye(3, 3);
    let u = StiefelMatrix::new(DenseMatrix::eye(3, 3))?;
    let s = SignMatrix::new(3, 3, vec![1, 1, 1, 1, 1, -1, 1, -1, 1])?;
    show("kkt-only", &x, &u, &s)?;

    let x = DenseMatrix::from_rows(&[[3.0, 1.0, -2.0], [4.0, 0.5, 1.0]])?;
    let u0 = init_u(2, 1, 0, InitScheme::SvdWarmStart(&x))?;
    let t = run(&x, &SolverConfig::nga(), &u0)?;
    show("nga-final", &x, &t.u_final, &t.s_certificate)?;
    Ok(())
}
