//! S-PNGA freezes its sign matrix in finitely many steps; compare the
//! observed freeze against the step bound computed from the exact optimum.

use l1pca::prelude::*;

fn main() -> l1pca::Result<()> {
    let x = generate(&InstanceSpec { d: 4, n: 12, seed: 3, ..InstanceSpec::default() })?;
    let k = 2;
    let f_max = brute_force_fmax(&x, k, 1 << 24)?.f_max;
    let u0 = init_u(x.rows(), k, 0, InitScheme::RandomStiefel)?;

    for tau in [0.01, 0.1, 1.0, 10.0] {
        let mut trace = run(&x, &SolverConfig::spnga(tau), &u0)?;
        let bound = trace.attach_bounds(f_max)?.cloned().expect("bound defined for tau > 0");
        let term = trace.terminal.as_ref().unwrap();
        println!(
            "tau={tau:<5} F={:.10} gap={:.2e} s_freeze={:?} bound={} ok={}",
            trace.final_objective(),
            f_max - trace.final_objective(),
            term.s_freeze_step,
            bound.theoretical,
            bound.satisfied
        );
    }
    Ok(())
}
