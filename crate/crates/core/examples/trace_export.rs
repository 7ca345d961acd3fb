//! Round-trips a convergence trace through JSON and prints its CSV view.

use l1pca::prelude::*;

fn main() -> l1pca::Result<()> {
    let x = generate(&InstanceSpec { d: 4, n: 20, seed: 2, ..InstanceSpec::default() })?;
    let u0 = init_u(4, 1, 0, InitScheme::SvdWarmStart(&x))?;
    let cfg = SolverConfig::spnga(0.05);
    let opts = RunOptions { record_iterates: true, ..RunOptions::default() };
    let trace = run_with(&x, &cfg, &u0, opts)?;

    let json = trace.to_json()?;
    let back = ConvergenceTrace::from_json(&json)?;
    assert!(back.u_final.bits_eq(&trace.u_final));
    assert!(back.verdicts_agree());
    println!("{} bytes of JSON, {} records, {} stored iterates", json.len(), back.records.len(), back.iterates.as_ref().map_or(0, Vec::len));
    print!("{}", trace.to_csv()?);
    Ok(())
}
