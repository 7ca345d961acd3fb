//! Command-line front end.
//!
//! Exit codes: `0` clean stop, `1` usage or I/O error, `2` iteration cap
//! reached, `3` degenerate iterate, `4` a verification row failed.

mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::data::{generate, load_csv_with_header, save_csv, write_csv, InstanceSpec};
use crate::error::{L1PcaError, Result};
use crate::oracle::{brute_force_fmax, tau_star, FMAX_DEFAULT_LIMIT, TAU_STAR_DEFAULT_LIMIT};
use crate::polar_core::DataMatrix;
use crate::solvers::{init_u, run_with, Algorithm, InitKind, RunOptions, SolverConfig, StopReason};
use crate::trace::ConvergenceTrace;

pub use verify::{verify_instance, VerifyOptions, VerifyRow, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_MAX_ITER: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_VERIFY_FAIL: i32 = 4;

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "L1PCA_SEED";

#[derive(Parser, Debug)]
#[command(name = "l1pca", version, about = "L1-norm PCA solvers, certificates and oracle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic instance and write it as CSV (one sample per row).
    Generate(GenerateArgs),
    /// Run one solver and write its convergence trace.
    Solve(SolveArgs),
    /// Exhaustive F^max (and optionally tau*) for a small instance.
    Oracle(OracleArgs),
    /// Run the full check matrix on one instance.
    Verify(VerifyArgs),
    /// Run all algorithms from a shared start and tabulate the results.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    outlier_fraction: f64,
    #[arg(long, default_value_t = 10.0)]
    outlier_scale: f64,
    #[arg(long, default_value_t = 0.1)]
    noise_std: f64,
    #[arg(long, default_value_t = 1)]
    latent_rank: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    centered: bool,
    /// Output path; `-` writes to stdout.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// CSV file, one sample per row.
    #[arg(long, short)]
    input: PathBuf,
    /// Skip the first CSV line.
    #[arg(long)]
    header: bool,
    /// Number of components K.
    #[arg(long, short, default_value_t = 1)]
    k: usize,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    #[arg(long, default_value = "nga")]
    algo: String,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Initializer: svd, random or first.
    #[arg(long, default_value = "svd")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the JSON trace here; `-` for stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the CSV table here; `-` for stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also evaluate the step bound against an exhaustive F^max.
    #[arg(long)]
    with_oracle: bool,
    /// Store every iterate in the JSON trace.
    #[arg(long)]
    record_iterates: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Also enumerate {0,+-1} sign matrices for tau*.
    #[arg(long)]
    tau_star: bool,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Extrapolation weight for PAMe and S-PAMe; chosen below the admissible
    /// threshold when omitted.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value = "svd")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value = "svd")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    with_oracle: bool,
}

/// Entry point used by the binary.
pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a, out),
        Command::Solve(a) => cmd_solve(a, out, err),
        Command::Oracle(a) => cmd_oracle(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Compare(a) => cmd_compare(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn seed_with_env(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| L1PcaError::InvalidInput(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn load(input: &InputArgs) -> Result<DataMatrix> {
    let x = load_csv_with_header(&input.input, input.header)?;
    if input.k == 0 || input.k > x.rows() {
        return Err(L1PcaError::InvalidInput(format!(
            "K must satisfy 1 <= K <= d = {}, got {}",
            x.rows(),
            input.k
        )));
    }
    Ok(x)
}

fn write_target(path: &Path, text: &str, out: &mut dyn Write) -> Result<()> {
    if path.as_os_str() == "-" {
        out.write_all(text.as_bytes())?;
    } else {
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn build_config(a: &SolverArgs) -> Result<SolverConfig> {
    let algorithm: Algorithm = a.algo.parse()?;
    let mut cfg = match algorithm {
        Algorithm::Nga => SolverConfig::nga(),
        Algorithm::Spnga => SolverConfig::spnga(a.tau.unwrap_or(0.1)),
        Algorithm::Pame => SolverConfig::pame(a.tau.unwrap_or(0.1), a.beta.unwrap_or(1.0), a.gamma.unwrap_or(0.0)),
        Algorithm::Spame => SolverConfig::spame(a.tau.unwrap_or(0.1), a.gamma.unwrap_or(0.0)),
    };
    cfg.max_iter = a.max_iter;
    cfg.seed = seed_with_env(a.seed)?;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = InstanceSpec {
        d: a.d,
        n: a.n,
        outlier_fraction: a.outlier_fraction,
        outlier_scale: a.outlier_scale,
        noise_std: a.noise_std,
        latent_rank: a.latent_rank,
        seed: seed_with_env(a.seed)?,
        centered: a.centered,
    };
    spec.validate()?;
    let x = generate(&spec)?;
    if a.out.as_os_str() == "-" {
        write_csv(&x, &mut *out)?;
    } else {
        save_csv(&x, &a.out)?;
        writeln!(out, "wrote {} samples of dimension {} to {}", x.cols(), x.rows(), a.out.display())?;
    }
    Ok(EXIT_OK)
}

fn fmt_step(s: Option<usize>) -> String {
    s.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn summary_line(t: &ConvergenceTrace) -> String {
    let term = t.terminal.as_ref();
    let mut line = format!(
        "algo={} F={} iters={} stop={} s_freeze={} u_freeze={} obj_freeze={} foc={}",
        t.algorithm(),
        t.final_objective(),
        t.iterations(),
        term.map_or("degenerate".to_string(), |x| x.stop_reason.to_string()),
        fmt_step(term.and_then(|x| x.s_freeze_step)),
        fmt_step(term.and_then(|x| x.u_freeze_step)),
        fmt_step(term.and_then(|x| x.obj_freeze_step)),
        term.is_some_and(|x| x.foc_certified),
    );
    if let Some(b) = term.and_then(|x| x.bounds.as_ref()) {
        line.push_str(&format!(" bound={} observed={} bound_ok={}", b.theoretical, fmt_step(b.observed), b.satisfied));
        if let (Some(p), Some(ok)) = (b.proof_bound, b.proof_bound_satisfied) {
            line.push_str(&format!(" proof_bound={p} proof_bound_ok={ok}"));
        }
    }
    line
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = build_config(&a.solver)?;
    let init: InitKind = a.solver.init.parse()?;
    let x = load(&a.input)?;
    let u0 = init_u(x.rows(), a.input.k, cfg.seed, init.scheme(&x))?;
    let opts = RunOptions { record_iterates: a.record_iterates, ..RunOptions::default() };
    let (trace, code) = match run_with(&x, &cfg, &u0, opts) {
        Ok(mut t) => {
            if a.with_oracle {
                let oracle = brute_force_fmax(&x, a.input.k, FMAX_DEFAULT_LIMIT)?;
                t.attach_bounds(oracle.f_max)?;
            }
            let code = match t.terminal.as_ref().map(|x| x.stop_reason) {
                Some(StopReason::MaxIter) => EXIT_MAX_ITER,
                _ => EXIT_OK,
            };
            (t, code)
        }
        Err(L1PcaError::DegenerateIterate { step, partial }) => {
            writeln!(err, "degenerate iterate at step {step}: polar-decomposition input is zero")?;
            match partial {
                Some(p) => (*p, EXIT_DEGENERATE),
                None => return Ok(EXIT_DEGENERATE),
            }
        }
        Err(e) => return Err(e),
    };
    if let Some(p) = &a.json {
        write_target(p, &(trace.to_json()? + "\n"), out)?;
    }
    if let Some(p) = &a.csv {
        write_target(p, &trace.to_csv()?, out)?;
    }
    // Keep stdout machine-readable when a table or trace goes there.
    let to_stdout = [&a.json, &a.csv].iter().any(|p| p.as_ref().is_some_and(|p| p.as_os_str() == "-"));
    let sink: &mut dyn Write = if to_stdout { err } else { out };
    writeln!(sink, "{}", summary_line(&trace))?;
    Ok(code)
}

fn cmd_oracle(a: OracleArgs, out: &mut dyn Write) -> Result<i32> {
    let x = load(&a.input)?;
    let r = brute_force_fmax(&x, a.input.k, FMAX_DEFAULT_LIMIT)?;
    let ts = if a.tau_star { Some(tau_star(&x, a.input.k, TAU_STAR_DEFAULT_LIMIT)?) } else { None };
    writeln!(out, "f_max={} enumerated={}", r.f_max, r.enumerated)?;
    writeln!(out, "s_star={:?}", r.s_star.as_slice())?;
    if let Some(t) = ts {
        writeln!(out, "tau_star={t}")?;
    }
    if let Some(p) = &a.json {
        let doc = serde_json::json!({ "oracle": r, "tau_star": ts });
        write_target(p, &(serde_json::to_string_pretty(&doc)? + "\n"), out)?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let init: InitKind = a.init.parse()?;
    let opts = VerifyOptions { tau: a.tau, beta: a.beta, gamma: a.gamma, seed: seed_with_env(a.seed)?, init };
    opts.validate()?;
    let x = load(&a.input)?;
    let rows = verify_instance(&x, a.input.k, &opts)?;
    let mut fails = 0;
    let mut skipped = 0;
    for r in &rows {
        writeln!(out, "{:<30} {:<8} {}", r.name, r.verdict.to_string(), r.detail)?;
        match r.verdict {
            Verdict::Fail => fails += 1,
            Verdict::Skipped => skipped += 1,
            Verdict::Pass => {}
        }
    }
    writeln!(out, "summary: {} passed, {} failed, {} skipped", rows.len() - fails - skipped, fails, skipped)?;
    Ok(if fails > 0 { EXIT_VERIFY_FAIL } else { EXIT_OK })
}

fn cmd_compare(a: CompareArgs, out: &mut dyn Write) -> Result<i32> {
    let init: InitKind = a.init.parse()?;
    let seed = seed_with_env(a.seed)?;
    let x = load(&a.input)?;
    let k = a.input.k;
    let u0 = init_u(x.rows(), k, seed, init.scheme(&x))?;
    let f_max = if a.with_oracle { Some(brute_force_fmax(&x, k, FMAX_DEFAULT_LIMIT)?.f_max) } else { None };

    let relaxed = RunOptions { allow_degenerate_params: true, ..RunOptions::default() };
    let rows: Vec<(String, SolverConfig, RunOptions)> = vec![
        ("nga".into(), SolverConfig::nga(), RunOptions::default()),
        (format!("spnga(tau={})", a.tau), SolverConfig::spnga(a.tau), RunOptions::default()),
        (format!("pame(tau={},beta={},gamma={})", a.tau, a.beta, a.gamma), SolverConfig::pame(a.tau, a.beta, a.gamma), RunOptions::default()),
        (format!("spame(tau={},gamma={})", a.tau, a.gamma), SolverConfig::spame(a.tau, a.gamma), RunOptions::default()),
        ("pame(0,0,0)".into(), SolverConfig::pame(0.0, 0.0, 0.0), relaxed),
        (format!("pame(tau={},beta=0,gamma={})", a.tau, a.gamma), SolverConfig::pame(a.tau, 0.0, a.gamma), relaxed),
    ];
    writeln!(
        out,
        "{:<40} {:>22} {:>7} {:>8} {:>8} {:>8} {:>5} {:>8} {:>8}",
        "algorithm", "F_final", "iters", "s_frz", "u_frz", "obj_frz", "foc", "bound", "bound_ok"
    )?;
    for (label, cfg, opts) in rows {
        match run_with(&x, &cfg.with_seed(seed), &u0, opts) {
            Ok(mut t) => {
                if let Some(f) = f_max {
                    t.attach_bounds(f)?;
                }
                let term = t.terminal.as_ref().expect("completed run");
                let (bound, ok) = term
                    .bounds
                    .as_ref()
                    .map_or(("-".to_string(), "-".to_string()), |b| (b.theoretical.to_string(), b.satisfied.to_string()));
                writeln!(
                    out,
                    "{:<40} {:>22} {:>7} {:>8} {:>8} {:>8} {:>5} {:>8} {:>8}",
                    label,
                    t.final_objective(),
                    t.iterations(),
                    fmt_step(term.s_freeze_step),
                    fmt_step(term.u_freeze_step),
                    fmt_step(term.obj_freeze_step),
                    term.foc_certified,
                    bound,
                    ok
                )?;
            }
            Err(L1PcaError::DegenerateIterate { step, .. }) => {
                writeln!(out, "{label:<40} degenerate iterate at step {step}")?;
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(f) = f_max {
        writeln!(out, "oracle f_max={f}")?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/golden_2x4.csv");

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("l1pca").chain(args.iter().copied());
        let code = run_cli(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn summary_moves_to_stderr_when_stdout_carries_json() {
        let (code, out, err) = call(&["solve", "--input", GOLDEN, "--json", "-"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.trim_start().starts_with('{'));
        assert!(err.contains("nga"));
        let (_, out, err) = call(&["solve", "--input", GOLDEN]);
        assert!(out.contains("nga") && err.is_empty());
    }

    #[test]
    fn unknown_algorithm_and_init_are_errors() {
        assert_eq!(call(&["solve", "--input", GOLDEN, "--algo", "sgd"]).0, EXIT_ERROR);
        assert_eq!(call(&["solve", "--input", GOLDEN, "--init", "zeros"]).0, EXIT_ERROR);
        assert_eq!(call(&["solve", "--input", GOLDEN, "--algo", "spnga", "--tau", "0"]).0, EXIT_ERROR);
    }

    #[test]
    fn golden_rows_all_pass_in_process() {
        let x = crate::data::load_csv(GOLDEN).unwrap();
        let rows = verify_instance(&x, 1, &VerifyOptions::default()).unwrap();
        assert_eq!(rows.len(), 15);
        assert!(rows.iter().all(|r| r.verdict == Verdict::Pass), "{rows:?}");
    }

    #[test]
    fn verify_flags_a_large_gamma() {
        let (code, out, _) = call(&["verify", "--input", GOLDEN, "--gamma", "0.99"]);
        assert!(out.contains("SKIPPED"), "{out}");
        assert_ne!(code, EXIT_ERROR);
    }
}
