mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{gaussian, instances, low_rank, random_stiefel, Instance};
use l1pca::optimality::{check_foc, check_partial_max, polar_gap};
use l1pca::oracle::{brute_force_fmax, gamma_threshold, sign_matrix_from_index, tau0_from_trace};
use l1pca::polar_core::{
    nuclear_norm, polar_decompose, shrink_check, sigma_plus_min, spectral_norm, x_times_sign, DenseMatrix,
    PdRegistry, SignMatrix, StiefelMatrix,
};
use l1pca::solvers::{
    init_u, nga_step, objective_bilinear, objective_f, pame_step, run_with, InitScheme, RunOptions, SolverConfig,
    SolverState, StopReason,
};
use l1pca::trace::{estimate_rho, ConvergenceTrace};
use l1pca::L1PcaError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

const ORACLE_LIMIT: u128 = 1 << 24;

fn recorded() -> RunOptions {
    RunOptions { record_iterates: true, ..RunOptions::default() }
}

fn start(inst: &Instance, seed: u64) -> StiefelMatrix {
    init_u(inst.x.rows(), inst.k, seed, InitScheme::RandomStiefel).unwrap()
}

/// Runs a solver; `None` when it hits a zero `X S` iterate.
fn solve(inst: &Instance, cfg: &SolverConfig, u0: &StiefelMatrix, opts: RunOptions) -> Option<ConvergenceTrace> {
    match run_with(&inst.x, cfg, u0, opts) {
        Ok(t) => Some(t),
        Err(L1PcaError::DegenerateIterate { .. }) => None,
        Err(e) => panic!("{}: {e}", inst.label),
    }
}

fn iterates(t: &ConvergenceTrace) -> Vec<StiefelMatrix> {
    t.iterates.as_ref().unwrap().iter().map(|i| i.u.clone()).collect()
}

fn ceil_div(a: f64, b: f64) -> u64 {
    (a / b).ceil() as u64
}

fn check(failures: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok && failures.len() < 5 {
        failures.push(msg());
    } else if !ok {
        failures.push(String::new());
    }
}

fn verdict(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Ok(summary)
    } else {
        let shown: Vec<_> = failures.iter().filter(|s| !s.is_empty()).cloned().collect();
        Err(format!("{summary}; {} failure(s): {}", failures.len(), shown.join(" | ")))
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t0 = Instant::now();
    let out = f();
    let dt = t0.elapsed();
    match out {
        Ok(s) if dt < limit => Ok(format!("{s}; {:.2}s < {:.0}s", dt.as_secs_f64(), limit.as_secs_f64())),
        Ok(s) => Err(format!("{s}; too slow: {:.2}s >= {:.0}s", dt.as_secs_f64(), limit.as_secs_f64())),
        Err(e) => Err(e),
    }
}

fn ac1_polar_kernel() -> Outcome {
    timed(Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut failures = Vec::new();
        let mut deficient = 0;
        for i in 0..1000 {
            let n = rng.random_range(1..=10);
            let m = rng.random_range(n..=50);
            let c = if i % 4 == 0 {
                deficient += 1;
                let r = rng.random_range(0..n);
                low_rank(&mut rng, m, n, r)
            } else {
                gaussian(&mut rng, m, n).scale(10f64.powi(rng.random_range(-3..=3)))
            };
            let pd = polar_decompose(&c).map_err(|e| e.to_string())?;
            let u = pd.u.as_matrix();
            let recon = u.matmul(&pd.h).unwrap().sub(&c).unwrap().frobenius_norm();
            let gram = u.t_matmul(u).unwrap().sub(&DenseMatrix::eye(n, n)).unwrap().frobenius_norm();
            let lmin = l1pca::polar_core::min_eigenvalue(&pd.h).unwrap();
            let h2 = spectral_norm(&pd.h);
            check(&mut failures, recon <= 1e-10 * c.frobenius_norm().max(1.0), || format!("#{i} recon {recon:e}"));
            check(&mut failures, gram <= 1e-12, || format!("#{i} ||U^T U - I|| = {gram:e}"));
            check(&mut failures, lmin >= -1e-10 * h2, || format!("#{i} lambda_min(H) = {lmin:e}"));
        }
        verdict(failures, format!("1000 matrices ({deficient} rank-deficient)"))
    })
}

fn ac2_gap_and_shrink() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    for i in 0..10_000 {
        let k = rng.random_range(1..=4);
        let d = rng.random_range(k..=8);
        let c = gaussian(&mut rng, d, k);
        let z = random_stiefel(&mut rng, d, k);
        let (lhs, rhs) = polar_gap(&c, &z).unwrap();
        worst = worst.min(lhs - rhs);
        check(&mut failures, lhs >= rhs - 1e-8, || format!("gap #{i}: {lhs} < {rhs}"));
    }
    for i in 0..500 {
        let k = rng.random_range(1..=5);
        let d = rng.random_range(k..=10);
        let a = gaussian(&mut rng, d, k);
        let u = polar_decompose(&a).unwrap().u;
        let tau = 0.5 * sigma_plus_min(&a).unwrap().unwrap();
        // u is a U-factor of tau*u + a by construction.
        check(&mut failures, shrink_check(&a, &u, tau), || format!("shrink #{i} rejected"));
    }
    verdict(failures, format!("10000 gap pairs (min lhs-rhs {worst:e}), 500 shrink cases"))
}

fn ac3_monotone() -> Outcome {
    let insts = instances(200, 20, 12, 3, 36, 3);
    let mut failures = Vec::new();
    let mut degenerate = 0;
    for inst in &insts {
        let u0 = start(inst, 0);
        for cfg in [SolverConfig::nga(), SolverConfig::spnga(0.1)] {
            let Some(t) = solve(inst, &cfg, &u0, RunOptions::default()) else {
                degenerate += 1;
                continue;
            };
            let vals = if cfg.tau == 0.0 { t.objective_values() } else { t.bilinear_values() };
            for w in vals.windows(2) {
                check(&mut failures, w[1] >= w[0] - 1e-10 * w[0].abs().max(1.0), || {
                    format!("{} {}: {} -> {}", inst.label, cfg.algorithm, w[0], w[1])
                });
            }
        }
    }
    verdict(failures, format!("200 instances x 2 solvers, {degenerate} degenerate run(s) excluded"))
}

fn ac4_nga_bound() -> Outcome {
    timed(Duration::from_secs(60), || {
        let insts = instances(100, 6, 16, 3, 16, 4);
        let mut failures = Vec::new();
        let mut worst_ratio: f64 = 0.0;
        let mut excluded = 0;
        for inst in &insts {
            let f_max = brute_force_fmax(&inst.x, inst.k, ORACLE_LIMIT).unwrap().f_max;
            let Some(mut t) = solve(inst, &SolverConfig::nga(), &start(inst, 1), recorded()) else {
                excluded += 1;
                continue;
            };
            let term = t.terminal.clone().unwrap();
            let Some(m) = term.obj_freeze_step else {
                check(&mut failures, false, || format!("{} did not freeze", inst.label));
                continue;
            };
            let us = iterates(&t);
            let tau0 = tau0_from_trace(&inst.x, &us[1..]).unwrap();
            let bound = ceil_div(f_max, tau0);
            worst_ratio = worst_ratio.max(m as f64 / bound as f64);
            check(&mut failures, (m as u64) <= bound, || format!("{} freeze {m} > {bound}", inst.label));
            let lib = t.attach_bounds(f_max).unwrap().cloned().unwrap();
            check(&mut failures, lib.theoretical == bound && lib.satisfied, || {
                format!("{} library bound {} vs {bound}", inst.label, lib.theoretical)
            });
            let foc = check_foc(&inst.x, &t.u_final, &t.s_certificate, 1e-8).unwrap();
            check(&mut failures, foc.is_foc, || format!("{} terminal not FOC ({:e})", inst.label, foc.foc_residual));
        }
        verdict(failures, format!("100 instances, max freeze/bound {worst_ratio:.3}, {excluded} degenerate"))
    })
}

/// Steps where S changed without any entry leaving zero.
fn ascent_gains(t: &ConvergenceTrace) -> Vec<(usize, f64)> {
    let its = t.iterates.as_ref().unwrap();
    let mut out = Vec::new();
    for (j, r) in t.records.iter().enumerate().skip(1) {
        if !r.s_changed {
            continue;
        }
        let (prev, cur) = (its[j - 1].s.as_slice(), its[j].s.as_slice());
        if prev.iter().zip(cur).any(|(&a, &b)| a != b && a == 0) {
            continue;
        }
        out.push((j, r.bilinear_value - r.cross_value.unwrap()));
    }
    out
}

fn ac5_spnga() -> Outcome {
    let insts = instances(100, 6, 16, 3, 16, 5);
    let mut failures = Vec::new();
    let (mut runs, mut ascents, mut certified) = (0, 0, 0);
    for inst in &insts {
        let f_max = brute_force_fmax(&inst.x, inst.k, ORACLE_LIMIT).unwrap().f_max;
        let u0 = start(inst, 2);
        for tau in [0.05, 0.1, 0.5] {
            let Some(mut t) = solve(inst, &SolverConfig::spnga(tau), &u0, recorded()) else {
                continue;
            };
            runs += 1;
            let term = t.terminal.clone().unwrap();
            let bound = ceil_div(2.0 * f_max, tau);
            match term.u_freeze_step {
                Some(m) => check(&mut failures, m as u64 <= bound, || format!("{} tau={tau}: {m} > {bound}", inst.label)),
                None => check(&mut failures, false, || format!("{} tau={tau}: no freeze", inst.label)),
            }
            let lib = t.attach_bounds(f_max).unwrap().cloned().unwrap();
            check(&mut failures, lib.theoretical == bound, || format!("{} library bound {}", inst.label, lib.theoretical));
            for (j, g) in ascent_gains(&t) {
                ascents += 1;
                check(&mut failures, g >= tau / 2.0 - 1e-9, || format!("{} tau={tau} k={j}: gain {g}", inst.label));
            }
            if let Some(tau1) = t.tau1() {
                if tau < tau1 {
                    certified += 1;
                    let foc = check_foc(&inst.x, &t.u_final, &t.s_certificate, 1e-8).unwrap().is_foc;
                    let pm = check_partial_max(&inst.x, &t.u_final, &t.s_certificate, 1e-8).unwrap();
                    check(&mut failures, foc && pm, || format!("{} tau={tau} < tau1={tau1}: foc={foc} pm={pm}", inst.label));
                }
            }
        }
    }
    verdict(failures, format!("{runs} runs, {ascents} ascent steps, {certified} small-tau certificates"))
}

fn ac6_nga_iterates() -> Outcome {
    let insts = instances(100, 8, 12, 3, 24, 6);
    let mut failures = Vec::new();
    let (mut audited, mut frozen) = (0, 0);
    for inst in &insts {
        let u0 = start(inst, 3);
        let Some(t) = solve(inst, &SolverConfig::nga(), &u0, recorded()) else {
            continue;
        };
        let term = t.terminal.clone().unwrap();
        let us = iterates(&t);
        let m = term.obj_freeze_step.unwrap_or(us.len() - 1);
        for j in 1..m.min(us.len()) {
            for i in 0..j {
                let dist = us[i].distance(&us[j]).unwrap();
                check(&mut failures, dist > 1e-12, || format!("{} U^{i} = U^{j}", inst.label));
            }
        }
        let full_rank = t.records.iter().all(|r| r.rank_xs == inst.k);
        let f0 = objective_f(&inst.x, &u0).unwrap();
        if !(full_rank || (inst.k == 1 && f0 > 0.0)) {
            continue;
        }
        audited += 1;
        let mut reg = PdRegistry::new();
        let mut u = t.u_final.clone();
        let mut hit = false;
        for _ in 0..100 {
            let (next, _) = nga_step(&inst.x, &u, &mut reg).unwrap();
            if next.bits_eq(&u) {
                hit = true;
                break;
            }
            u = next;
        }
        frozen += usize::from(hit);
        check(&mut failures, hit, || format!("{} no bit-exact U freeze", inst.label));
    }
    verdict(failures, format!("{audited} rank-audited runs, {frozen} bit-exact freezes, no repeats"))
}

fn ac7_pame() -> Outcome {
    let insts = instances(100, 6, 16, 3, 16, 7);
    let (tau, beta) = (0.1, 1.0);
    let mut failures = Vec::new();
    let (mut runs, mut limit_checked, mut slow_u) = (0, 0, 0);
    for inst in &insts {
        let gamma = 0.5 * gamma_threshold(&inst.x, tau, beta).unwrap();
        let cfg = SolverConfig::pame(tau, beta, gamma);
        let Some(t) = solve(inst, &cfg, &start(inst, 4), recorded()) else {
            continue;
        };
        runs += 1;
        let term = t.terminal.clone().unwrap();
        let us = iterates(&t);
        let last = us.len() - 1;
        let s_star = t.s_final.clone();
        let resume = || SolverState::resume(us[last].clone(), us[last.saturating_sub(1)].clone(), s_star.clone(), gamma).unwrap();
        if term.stop_reason == StopReason::MaxIter {
            // U still moving; S must already be constant and stay so.
            slow_u += 1;
            let mut state = resume();
            let mut stable = true;
            for _ in 0..200 {
                state = pame_step(&inst.x, &state, tau, beta, gamma).unwrap();
                stable &= state.s == s_star;
            }
            let last_change = t.records.iter().rposition(|r| r.s_changed).unwrap_or(0);
            check(&mut failures, stable && last_change < t.max_iter, || {
                format!("{} S not frozen (last change {last_change}, stable {stable})", inst.label)
            });
            continue;
        }
        check(&mut failures, term.stop_reason == StopReason::UFrozen && term.s_freeze_step.is_some(), || {
            format!("{} stop {}", inst.label, term.stop_reason)
        });
        let xs = x_times_sign(&inst.x, &s_star).unwrap();
        let pd = polar_decompose(&xs).unwrap();
        let smin = sigma_plus_min(&xs).unwrap().unwrap_or(0.0);
        let tau_ok = t.tau1().is_some_and(|t1| tau < t1);
        if !pd.is_full_rank() || beta >= smin || !tau_ok {
            continue;
        }
        limit_checked += 1;
        let mut state = resume();
        let mut dist = state.u.distance(&pd.u).unwrap();
        for _ in 0..200 {
            if dist < 1e-6 {
                break;
            }
            state = pame_step(&inst.x, &state, tau, beta, gamma).unwrap();
            dist = state.u.distance(&pd.u).unwrap();
        }
        let foc = check_foc(&inst.x, &pd.u, &s_star, 1e-8).unwrap().is_foc;
        check(&mut failures, dist < 1e-6 && foc, || format!("{} residual {dist:e}, foc {foc}", inst.label));
    }
    verdict(failures, format!("{runs} runs froze S ({slow_u} with U still moving at max_iter), {limit_checked} limit-direction checks"))
}

fn ac8_spame() -> Outcome {
    let insts = instances(100, 6, 16, 3, 16, 8);
    let tau = 0.1;
    let mut failures = Vec::new();
    let (mut runs, mut over_proof, mut certified) = (0, 0, 0);
    let mut notes = Vec::new();
    for inst in &insts {
        let u0 = start(inst, 5);
        let Some(pilot) = solve(inst, &SolverConfig::spame(tau, 0.0), &u0, recorded()) else {
            continue;
        };
        if inst.k > 1 && pilot.first_rank_deficient().is_some() {
            continue;
        }
        let threshold = |t: &ConvergenceTrace| gamma_threshold(&inst.x, tau, t.lambda_min_over_trace().max(0.0)).unwrap();
        let mut gamma = 0.5 * threshold(&pilot);
        let mut chosen = None;
        for _ in 0..8 {
            if let Some(t) = solve(inst, &SolverConfig::spame(tau, gamma), &u0, recorded()) {
                let rank_ok = inst.k == 1 || t.first_rank_deficient().is_none();
                if rank_ok && gamma < threshold(&t) {
                    chosen = Some(t);
                    break;
                }
            }
            gamma *= 0.5;
        }
        let Some(mut t) = chosen else {
            continue;
        };
        runs += 1;
        let f_max = brute_force_fmax(&inst.x, inst.k, ORACLE_LIMIT).unwrap().f_max;
        let term = t.terminal.clone().unwrap();
        let statement = ceil_div(8.0 * f_max, tau * (1.0 - gamma));
        let proof = ceil_div(4.0 * f_max, tau * (1.0 - gamma));
        match term.u_freeze_step {
            Some(m) if term.stop_reason == StopReason::SFrozen => {
                check(&mut failures, m as u64 <= statement, || format!("{} freeze {m} > {statement}", inst.label));
                if m as u64 > proof {
                    over_proof += 1;
                    notes.push(format!("{}: {m} > {proof}", inst.label));
                }
            }
            _ => check(&mut failures, false, || format!("{} stop {}", inst.label, term.stop_reason)),
        }
        let lib = t.attach_bounds(f_max).unwrap().cloned().unwrap();
        check(&mut failures, lib.theoretical == statement && lib.proof_bound == Some(proof), || {
            format!("{} library bounds {} / {:?}", inst.label, lib.theoretical, lib.proof_bound)
        });
        if t.tau1().is_some_and(|t1| tau < t1) {
            certified += 1;
            let foc = check_foc(&inst.x, &t.u_final, &t.s_certificate, 1e-8).unwrap();
            check(&mut failures, foc.is_foc, || format!("{} terminal not FOC", inst.label));
        }
    }
    let mut summary = format!("{runs} admissible runs, {certified} small-tau certificates, {over_proof} above the 4F/(tau(1-gamma)) bound");
    if !notes.is_empty() {
        summary.push_str(&format!(" [{}]", notes.join(", ")));
    }
    verdict(failures, summary)
}

/// `a` is an NGA-family trace (stores `sgn(X^T U^k)` at `k`), `b` a
/// PAMe-family trace (stores the sign that produced `U^k`), so signs are
/// compared one index apart.
fn same_prefix(a: &ConvergenceTrace, b: &ConvergenceTrace) -> bool {
    let (ia, ib) = (a.iterates.as_ref().unwrap(), b.iterates.as_ref().unwrap());
    let n = ia.len().min(ib.len());
    n > 0
        && (0..n).all(|j| ia[j].u.bits_eq(&ib[j].u))
        && (0..n.min(ib.len() - 1)).all(|j| ia[j].s == ib[j + 1].s)
}

fn ac9_reductions() -> Outcome {
    let insts = instances(50, 10, 12, 3, 36, 9);
    let relaxed = RunOptions { record_iterates: true, allow_degenerate_params: true };
    let mut failures = Vec::new();
    let mut compared = 0;
    for inst in &insts {
        let u0 = start(inst, 6);
        let pairs = [
            (SolverConfig::nga(), SolverConfig::pame(0.0, 0.0, 0.0)),
            (SolverConfig::spnga(0.1), SolverConfig::spame(0.1, 0.0)),
        ];
        for (a, b) in pairs {
            let (ta, tb) = (solve(inst, &a, &u0, recorded()), solve(inst, &b, &u0, relaxed));
            let (Some(ta), Some(tb)) = (ta, tb) else {
                continue;
            };
            compared += 1;
            check(&mut failures, same_prefix(&ta, &tb), || format!("{} {} vs {}", inst.label, a.algorithm, b.algorithm));
        }
    }
    verdict(failures, format!("{compared} bitwise iterate comparisons"))
}

fn ac10_rate() -> Outcome {
    let insts = instances(100, 10, 12, 3, 36, 10);
    let mut failures = Vec::new();
    let mut applicable = 0;
    for inst in &insts {
        let Some(t) = solve(inst, &SolverConfig::nga(), &start(inst, 7), RunOptions::default()) else {
            continue;
        };
        if t.terminal.as_ref().unwrap().obj_freeze_step.is_none_or(|m| m < 2) {
            continue;
        }
        applicable += 1;
        let rho = estimate_rho(&t).map_err(|e| format!("{}: {e}", inst.label))?;
        check(&mut failures, rho > 0.0 && rho < 1.0, || format!("{} rho = {rho}", inst.label));
    }
    if applicable == 0 {
        return Err("no trace froze at step >= 2".into());
    }
    verdict(failures, format!("{applicable} traces froze at step >= 2"))
}

fn ac11_oracle() -> Outcome {
    let insts = instances(50, 5, 10, 2, 10, 11);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut failures = Vec::new();
    let mut enumerated = 0u64;
    for inst in &insts {
        let (x, k) = (&inst.x, inst.k);
        let f = brute_force_fmax(x, k, ORACLE_LIMIT).unwrap().f_max;
        let tol = 1e-10 * f.max(1.0);
        let fneg = brute_force_fmax(&x.scale(-1.0), k, ORACLE_LIMIT).unwrap().f_max;
        check(&mut failures, (f - fneg).abs() <= tol, || format!("{} -X: {f} vs {fneg}", inst.label));
        let mut perm: Vec<usize> = (0..x.cols()).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let xp = x.select_columns(&perm).unwrap();
        let fp = brute_force_fmax(&xp, k, ORACLE_LIMIT).unwrap().f_max;
        check(&mut failures, (f - fp).abs() <= tol, || format!("{} perm: {f} vs {fp}", inst.label));

        for t in 0..(1u64 << (x.cols() * k)) {
            let s: SignMatrix = sign_matrix_from_index(t, x.cols(), k);
            let xs = x_times_sign(x, &s).unwrap();
            let nuc = nuclear_norm(&xs).unwrap();
            let u = polar_decompose(&xs).unwrap().u;
            let at_u = objective_bilinear(x, &u, &s).unwrap();
            enumerated += 1;
            check(&mut failures, (nuc - at_u).abs() <= 1e-10 * nuc.max(1.0), || {
                format!("{} S#{t}: nuclear {nuc} vs <XS,U> {at_u}", inst.label)
            });
        }
    }
    verdict(failures, format!("50 instances, {enumerated} sign matrices checked"))
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_l1pca")).args(args).env_remove("L1PCA_SEED").output().unwrap()
}

fn ac12_cli() -> Outcome {
    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/data/golden_2x4.csv");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path().join("x.csv");
    let data = data.to_str().unwrap();
    let gen = cli(&["generate", "--d", "5", "--n", "9", "--seed", "4", "--out", data]);
    if !gen.status.success() {
        return Err(format!("generate failed: {}", String::from_utf8_lossy(&gen.stderr)));
    }
    let mut runs = 0;
    for algo in ["nga", "spnga", "pame", "spame"] {
        let args = ["solve", "--input", data, "--k", "2", "--algo", algo, "--init", "random", "--seed", "9", "--json", "-"];
        let (a, b) = (cli(&args), cli(&args));
        if a.stdout.is_empty() || a.stdout != b.stdout || a.stderr != b.stderr {
            return Err(format!("solve --algo {algo} not byte-identical across runs"));
        }
        runs += 1;
    }
    let v = cli(&["verify", "--input", golden, "--k", "1"]);
    let text = String::from_utf8_lossy(&v.stdout);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with("summary")).collect();
    let all_pass = !rows.is_empty() && rows.iter().all(|l| l.split_whitespace().nth(1) == Some("PASS"));
    if v.status.code() != Some(0) || !all_pass {
        return Err(format!("golden verify not all-PASS (exit {:?}):\n{text}", v.status.code()));
    }
    Ok(format!("{runs} solve commands byte-identical, golden verify {} rows PASS", rows.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("AC1", "polar kernel accuracy", ac1_polar_kernel),
        ("AC2", "polar gap and shrinkage", ac2_gap_and_shrink),
        ("AC3", "monotone objectives", ac3_monotone),
        ("AC4", "NGA objective-freeze bound and FOC", ac4_nga_bound),
        ("AC5", "S-PNGA freeze, ascent and small-tau certificate", ac5_spnga),
        ("AC6", "NGA bit-exact freeze and no repeats", ac6_nga_iterates),
        ("AC7", "PAMe sign freeze and limit direction", ac7_pame),
        ("AC8", "S-PAMe triple freeze bounds", ac8_spame),
        ("AC9", "reduction identities", ac9_reductions),
        ("AC10", "linear rate estimate", ac10_rate),
        ("AC11", "oracle invariances and nuclear-norm identity", ac11_oracle),
        ("AC12", "CLI determinism and golden verify", ac12_cli),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match out {
            Ok(detail) => println!("[PASS] {id} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
