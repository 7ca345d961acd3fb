//! PAMe: S freezes after finitely many steps while U converges to the
//! polar factor of `X S*`.

use l1pca::prelude::*;

fn main() -> l1pca::Result<()> {
    let x = generate(&InstanceSpec { d: 5, n: 20, seed: 11, ..InstanceSpec::default() })?;
    let u0 = init_u(x.rows(), 2, 0, InitScheme::SvdWarmStart(&x))?;
    let cfg = SolverConfig::pame(0.05, 1.0, 0.3);
    let trace = run(&x, &cfg, &u0)?;
    let term = trace.terminal.as_ref().unwrap();
    println!("stop: {} after {} steps, S frozen from {:?}", term.stop_reason, trace.iterations(), term.s_freeze_step);

    for r in trace.records.iter().step_by(5) {
        println!("k={:<4} F={:.12} ||U^k - U^(k-1)||={:.3e}", r.k, r.f_value, r.u_delta);
    }
    let limit = polar_decompose(&x.matmul(&trace.s_final.to_dense())?)?.u;
    println!("||U_final - PD(X S*)||_F = {:.3e}", trace.u_final.distance(&limit)?);
    // Certification is guaranteed once tau is below the observed tau1.
    println!("tau1 = {:?}, foc at the terminal iterate: {}", trace.tau1(), term.foc_certified);
    Ok(())
}
