use crate::error::{shape_err, L1PcaError, Result};
use crate::optimality::{certify, default_tol, default_zero_tol};
use crate::polar_core::dense::sgn_unchecked;
use crate::polar_core::{x_times_sign, DataMatrix, PdRegistry, SignMatrix, StiefelMatrix};
use crate::solvers::config::{Algorithm, RunOptions, SolverConfig, SolverState, StopReason};
use crate::solvers::steps::{bilinear_with, pame_step, registered_pd, spame_step, spnga_step};
use crate::trace::{ConvergenceTrace, IterationRecord, Iterate, Shape, Terminal, TRACE_SCHEMA};

/// PAMe declares its U-iterate frozen below this Frobenius step.
pub const PAME_U_TOL: f64 = 1e-12;

/// Runs `cfg.algorithm` from `u0` until a stop rule fires.
pub fn run(x: &DataMatrix, cfg: &SolverConfig, u0: &StiefelMatrix) -> Result<ConvergenceTrace> {
    run_with(x, cfg, u0, RunOptions::default())
}

struct Recorder<'a> {
    x: &'a DataMatrix,
    zero_tol: f64,
    records: Vec<IterationRecord>,
    iterates: Option<Vec<Iterate>>,
}

impl Recorder<'_> {
    fn push(
        &mut self,
        reg: &mut PdRegistry,
        u: &StiefelMatrix,
        s: &SignMatrix,
        prev: Option<(&StiefelMatrix, &SignMatrix)>,
    ) -> Result<&IterationRecord> {
        let v = self.x.t_matmul(u.as_matrix())?;
        let min_nonzero_proj = v
            .as_slice()
            .iter()
            .map(|a| a.abs())
            .filter(|&a| a > self.zero_tol)
            .min_by(f64::total_cmp);
        let audit = reg.factors(&x_times_sign(self.x, s)?, s)?;
        let (cross_value, s_changed, u_delta) = match prev {
            Some((up, sp)) => (Some(bilinear_with(&v, sp)?), sp != s, u.distance(up)?),
            None => (None, false, 0.0),
        };
        self.records.push(IterationRecord {
            k: self.records.len(),
            f_value: v.l1_norm(),
            bilinear_value: bilinear_with(&v, s)?,
            cross_value,
            s_changed,
            u_delta,
            rank_xs: audit.rank,
            lambda_min_h: audit.lambda_min,
            min_nonzero_proj,
        });
        if let Some(it) = self.iterates.as_mut() {
            it.push(Iterate { u: u.clone(), s: s.clone() });
        }
        Ok(self.records.last().expect("just pushed"))
    }
}

/// Stop reason with the S, U and objective freeze steps.
type Stop = (StopReason, Option<usize>, Option<usize>, Option<usize>);

struct Outcome {
    terminal: Option<Stop>,
    u_final: StiefelMatrix,
    s_final: SignMatrix,
    s_certificate: SignMatrix,
}

/// [`run`] with explicit [`RunOptions`].
///
/// A zero polar-decomposition input aborts the run with
/// [`L1PcaError::DegenerateIterate`] carrying the partial trace.
pub fn run_with(x: &DataMatrix, cfg: &SolverConfig, u0: &StiefelMatrix, opts: RunOptions) -> Result<ConvergenceTrace> {
    if opts.allow_degenerate_params {
        cfg.validate_ranges()?;
    } else {
        cfg.validate()?;
    }
    if x.rows() != u0.d() {
        return Err(shape_err(format!("X has {} rows but U0 has {}", x.rows(), u0.d())));
    }
    if x.cols() == 0 || u0.k() == 0 {
        return Err(shape_err("need at least one sample and one component"));
    }
    let max_iter = cfg.effective_max_iter(x, u0.k());
    let window = cfg.effective_freeze_window();
    let zero_tol = default_zero_tol(x);
    let tol = default_tol(x);
    let mut rec = Recorder {
        x,
        zero_tol,
        records: Vec::new(),
        iterates: opts.record_iterates.then(Vec::new),
    };

    let mut last = (u0.clone(), SignMatrix::zeros(x.cols(), u0.k()));
    let outcome = drive(x, cfg, u0, max_iter, window, &mut rec, &mut last);

    let shape = Shape { d: x.rows(), n: x.cols(), k: u0.k() };
    let build = |rec: Recorder<'_>, out: Outcome, foc: Option<bool>| ConvergenceTrace {
        schema: TRACE_SCHEMA.to_string(),
        config: cfg.clone(),
        max_iter,
        freeze_window: window,
        shape,
        zero_tol,
        tol,
        records: rec.records,
        terminal: out.terminal.map(|(stop_reason, s_freeze_step, u_freeze_step, obj_freeze_step)| Terminal {
            stop_reason,
            s_freeze_step,
            u_freeze_step,
            obj_freeze_step,
            foc_certified: foc.unwrap_or(false),
            bounds: None,
        }),
        u_final: out.u_final,
        s_final: out.s_final,
        s_certificate: out.s_certificate,
        iterates: rec.iterates,
    };

    match outcome {
        Ok(out) => {
            let foc = certify(x, &out.u_final, &out.s_certificate, tol, zero_tol)?.is_foc;
            Ok(build(rec, out, Some(foc)))
        }
        Err(L1PcaError::DegenerateIterate { step, .. }) => {
            let (u, s) = last;
            let out = Outcome { terminal: None, u_final: u, s_final: s.clone(), s_certificate: s };
            Err(L1PcaError::DegenerateIterate { step, partial: Some(Box::new(build(rec, out, None))) })
        }
        Err(e) => Err(e),
    }
}

fn drive(
    x: &DataMatrix,
    cfg: &SolverConfig,
    u0: &StiefelMatrix,
    max_iter: usize,
    window: usize,
    rec: &mut Recorder<'_>,
    last: &mut (StiefelMatrix, SignMatrix),
) -> Result<Outcome> {
    let mut reg = PdRegistry::new();
    let mut state = SolverState::initial(x, u0)?;
    *last = (state.u.clone(), state.s.clone());
    rec.push(&mut reg, &state.u, &state.s, None)?;

    let mut unchanged = 0usize;
    for k in 1..=max_iter {
        let next = match cfg.algorithm {
            Algorithm::Nga => {
                let u = registered_pd(x, &state.s, &mut reg, k)?;
                let s = sgn_unchecked(&x.t_matmul(u.as_matrix())?);
                SolverState { e: u.as_matrix().clone(), u_prev: state.u.clone(), u, s, k }
            }
            Algorithm::Spnga => spnga_step(x, &state, cfg.tau, &mut reg)?,
            Algorithm::Pame => pame_step(x, &state, cfg.tau, cfg.beta, cfg.gamma)?,
            Algorithm::Spame => spame_step(x, &state, cfg.tau, cfg.gamma, &mut reg)?,
        };
        let r = rec.push(&mut reg, &next.u, &next.s, Some((&state.u, &state.s)))?.clone();
        *last = (next.u.clone(), next.s.clone());
        unchanged = if r.s_changed { 0 } else { unchanged + 1 };
        let prev_s = std::mem::replace(&mut state, next).s;

        let done = |reason, sf, uf, of, cert: SignMatrix, st: &SolverState| Outcome {
            terminal: Some((reason, sf, uf, of)),
            u_final: st.u.clone(),
            s_final: st.s.clone(),
            s_certificate: cert,
        };
        match cfg.algorithm {
            Algorithm::Nga => {
                if r.cross_value == Some(r.bilinear_value) {
                    let uf = (!r.s_changed).then_some(k);
                    return Ok(done(StopReason::ObjectiveFrozen, None, uf, Some(k), prev_s, &state));
                }
            }
            Algorithm::Spnga => {
                if unchanged >= window {
                    let kp = k - window;
                    let cert = state.s.clone();
                    return Ok(done(StopReason::SFrozen, Some(kp), Some(kp + 1), None, cert, &state));
                }
            }
            Algorithm::Pame => {
                if unchanged >= window && r.u_delta <= PAME_U_TOL {
                    let sf = rec.records.iter().rposition(|r| r.s_changed).unwrap_or(0);
                    let cert = state.s.clone();
                    return Ok(done(StopReason::UFrozen, Some(sf), Some(k), None, cert, &state));
                }
            }
            Algorithm::Spame => {
                if unchanged >= window && k - window >= 1 {
                    let kp = k - window;
                    let cert = state.s.clone();
                    return Ok(done(StopReason::SFrozen, Some(kp), Some(kp), None, cert, &state));
                }
            }
        }
    }
    Ok(Outcome {
        terminal: Some((StopReason::MaxIter, None, None, None)),
        u_final: state.u.clone(),
        s_final: state.s.clone(),
        s_certificate: state.s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar_core::DenseMatrix;

    #[test]
    fn single_sample_nga_stops_at_step_one() {
        let x = DenseMatrix::from_column(&[3.0, 4.0]).unwrap();
        let u0 = StiefelMatrix::first_columns(2, 1).unwrap();
        let t = run(&x, &SolverConfig::nga(), &u0).unwrap();
        let term = t.terminal.as_ref().unwrap();
        assert_eq!(term.stop_reason, StopReason::ObjectiveFrozen);
        assert_eq!(term.obj_freeze_step, Some(1));
        assert!(term.foc_certified);
        assert!((t.u_final.as_matrix().get(0, 0) - 0.6).abs() < 1e-15);
        assert!(t.verdicts_agree());
    }

    #[test]
    fn degenerate_start_returns_partial_trace() {
        let x = DenseMatrix::from_column(&[0.0, 4.0]).unwrap();
        let u0 = StiefelMatrix::first_columns(2, 1).unwrap();
        match run(&x, &SolverConfig::nga(), &u0) {
            Err(L1PcaError::DegenerateIterate { step: 1, partial: Some(p) }) => {
                assert_eq!(p.records.len(), 1);
                assert!(p.terminal.is_none());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn huge_tau_keeps_initial_signs() {
        let x = DenseMatrix::from_rows(&[[1.0, -2.0, 0.5, 0.1], [0.3, 1.0, -1.0, 2.0]]).unwrap();
        let u0 = StiefelMatrix::first_columns(2, 1).unwrap();
        let t = run(&x, &SolverConfig::spnga(1e6), &u0).unwrap();
        assert!(t.records.iter().all(|r| !r.s_changed));
        assert_eq!(t.terminal.unwrap().s_freeze_step, Some(0));
    }

    #[test]
    fn strict_validation_rejects_zero_pame_weights() {
        let x = DenseMatrix::from_column(&[3.0, 4.0]).unwrap();
        let u0 = StiefelMatrix::first_columns(2, 1).unwrap();
        let cfg = SolverConfig::pame(0.0, 0.0, 0.0);
        assert!(run(&x, &cfg, &u0).is_err());
        let opts = RunOptions { allow_degenerate_params: true, ..RunOptions::default() };
        assert!(run_with(&x, &cfg, &u0, opts).is_ok());
    }
}
