//! NGA for one L1 direction (K = 1) on a synthetic instance with outliers.

use l1pca::prelude::*;

fn main() -> l1pca::Result<()> {
    let x = generate(&InstanceSpec { d: 6, n: 40, seed: 7, ..InstanceSpec::default() })?;
    let u0 = init_u(x.rows(), 1, 0, InitScheme::SvdWarmStart(&x))?;
    let trace = run(&x, &SolverConfig::nga(), &u0)?;
    let term = trace.terminal.as_ref().expect("completed run");

    for r in &trace.records {
        println!("k={:<3} F={:.12} s_changed={}", r.k, r.f_value, r.s_changed);
    }
    println!("stop: {} after {} steps, foc = {}", term.stop_reason, trace.iterations(), term.foc_certified);
    println!("direction: {:?}", trace.u_final.as_matrix().column(0));
    Ok(())
}
