//! All four solvers from a shared starting point.

use l1pca::prelude::*;

fn main() -> l1pca::Result<()> {
    let x = generate(&InstanceSpec { d: 5, n: 10, seed: 21, ..InstanceSpec::default() })?;
    let k = 2;
    let f_max = brute_force_fmax(&x, k, 1 << 24)?.f_max;
    let u0 = init_u(x.rows(), k, 1, InitScheme::RandomStiefel)?;
    let configs = [
        SolverConfig::nga(),
        SolverConfig::spnga(0.1),
        SolverConfig::pame(0.1, 1.0, 0.2),
        SolverConfig::spame(0.1, 0.0),
    ];
    println!("F^max = {f_max}");
    for cfg in configs {
        let t = run(&x, &cfg, &u0)?;
        let term = t.terminal.as_ref().unwrap();
        println!(
            "{:<6} F={:.10} rel.gap={:.2e} steps={:<4} stop={}",
            cfg.algorithm,
            t.final_objective(),
            (f_max - t.final_objective()) / f_max,
            t.iterations(),
            term.stop_reason
        );
    }
    Ok(())
}
