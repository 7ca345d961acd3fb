//! Exhaustive search over sign matrices for the exact maximum and the
//! threshold `tau*`.

use l1pca::prelude::*;

fn main() -> l1pca::Result<()> {
    let x = DenseMatrix::from_rows(&[[6.0, 4.0, -9.0, 1.0], [9.0, -1.0, 4.0, -7.0]])?;
    let best = brute_force_fmax(&x, 1, 1 << 24)?;
    println!("F^max = {} over {} sign matrices", best.f_max, best.enumerated);
    println!("S* = {:?}", best.s_star.as_slice());
    println!("U* = {:?}", best.u_star.as_matrix().column(0));
    println!("tau* = {}", tau_star(&x, 1, 14_348_907)?);

    let too_big = generate(&InstanceSpec { d: 3, n: 30, ..InstanceSpec::default() })?;
    match brute_force_fmax(&too_big, 1, 1 << 24) {
        Err(e) => println!("n = 30: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
