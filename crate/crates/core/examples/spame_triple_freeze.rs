//! S-PAMe stops once three consecutive sign matrices agree. The
//! extrapolation weight is kept below `lambda * tau / ||X||_2^2`.

use l1pca::prelude::*;

fn main() -> l1pca::Result<()> {
    let x = generate(&InstanceSpec { d: 4, n: 10, seed: 5, ..InstanceSpec::default() })?;
    let k = 1;
    let tau = 0.5;
    let u0 = init_u(x.rows(), k, 0, InitScheme::SvdWarmStart(&x))?;

    let pilot = run(&x, &SolverConfig::spame(tau, 0.0), &u0)?;
    let threshold = gamma_threshold(&x, tau, pilot.lambda_min_over_trace())?;
    let gamma = 0.5 * threshold;
    println!("lambda over pilot = {:.6}, gamma threshold = {threshold:.3e}, using {gamma:.3e}", pilot.lambda_min_over_trace());

    let mut trace = run(&x, &SolverConfig::spame(tau, gamma), &u0)?;
    let f_max = brute_force_fmax(&x, k, 1 << 24)?.f_max;
    let bound = trace.attach_bounds(f_max)?.cloned().unwrap();
    let term = trace.terminal.as_ref().unwrap();
    println!("stop: {} at step {}, freeze index {:?}", term.stop_reason, trace.iterations(), term.s_freeze_step);
    println!("bound {} satisfied = {}; tighter bound {:?}", bound.theoretical, bound.satisfied, bound.proof_bound);
    println!("gap to F^max: {:.3e}", f_max - trace.final_objective());
    Ok(())
}
