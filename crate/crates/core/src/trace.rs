//! Per-iteration convergence records, freeze analytics and serialization.
//!
//! The JSON document carries `"schema": "l1pca-trace/1"`. The CSV export
//! has the columns `k,F,bilinear,s_changed,u_delta`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, L1PcaError, Result};
use crate::polar_core::{SignMatrix, StiefelMatrix};
use crate::solvers::{Algorithm, SolverConfig, StopReason};

pub const TRACE_SCHEMA: &str = "l1pca-trace/1";

/// One recorded iterate `(U^k, S^k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// `F(U^k) = ||X^T U^k||_1`.
    pub f_value: f64,
    /// `<X^T U^k, S^k>`.
    pub bilinear_value: f64,
    /// `<X^T U^k, S^{k-1}>`; absent at `k = 0`.
    pub cross_value: Option<f64>,
    /// `S^k != S^{k-1}`.
    pub s_changed: bool,
    /// `||U^k - U^{k-1}||_F`.
    pub u_delta: f64,
    /// Numerical rank of `X S^k`.
    pub rank_xs: usize,
    /// Smallest eigenvalue of the H-factor of `X S^k`.
    pub lambda_min_h: f64,
    /// Smallest `|x_i^T u_j|` above the zero tolerance, for `U^k`.
    pub min_nonzero_proj: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub u: StiefelMatrix,
    pub s: SignMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    /// `ceil(F^max / tau0)` on the objective-freeze step.
    NgaObjective,
    /// `ceil(2 F^max / tau)` on the iterate-freeze step.
    SpngaIterates,
    /// `ceil(4 F^max / (tau (1 - gamma)))` on the iterate-freeze step.
    SpameIterates,
    /// `ceil(8 F^max / (tau (1 - gamma)))`, the looser form.
    SpameStatement,
}

/// Observed freeze step against a theoretical step bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub kind: BoundKind,
    pub f_max: f64,
    pub theoretical: u64,
    pub observed: Option<usize>,
    pub satisfied: bool,
    /// Tighter companion bound reported alongside (S-PAMe only).
    pub proof_bound: Option<u64>,
    pub proof_bound_satisfied: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub stop_reason: StopReason,
    pub s_freeze_step: Option<usize>,
    pub u_freeze_step: Option<usize>,
    pub obj_freeze_step: Option<usize>,
    pub foc_certified: bool,
    pub bounds: Option<BoundCheck>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub d: usize,
    pub n: usize,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub schema: String,
    pub config: SolverConfig,
    pub max_iter: usize,
    pub freeze_window: usize,
    pub shape: Shape,
    pub zero_tol: f64,
    pub tol: f64,
    pub records: Vec<IterationRecord>,
    /// Absent only on runs aborted by a degenerate iterate.
    pub terminal: Option<Terminal>,
    pub u_final: StiefelMatrix,
    pub s_final: SignMatrix,
    /// Sign matrix used to certify the final U-factor.
    pub s_certificate: SignMatrix,
    pub iterates: Option<Vec<Iterate>>,
}

/// Terminal verdicts re-derived from the raw records.
#[derive(Clone, Debug, PartialEq)]
pub struct RecomputedTerminal {
    pub s_freeze_step: Option<usize>,
    pub u_freeze_step: Option<usize>,
    pub obj_freeze_step: Option<usize>,
    pub bound_satisfied: Option<bool>,
}

/// Closed-form step bounds.
pub fn step_bound(kind: BoundKind, f_max: f64, tau: f64, tau0: f64, gamma: f64) -> Result<u64> {
    if !f_max.is_finite() || f_max < 0.0 {
        return Err(invalid(format!("f_max must be finite and >= 0, got {f_max}")));
    }
    let denom = match kind {
        BoundKind::NgaObjective => tau0,
        BoundKind::SpngaIterates => tau,
        BoundKind::SpameIterates | BoundKind::SpameStatement => tau * (1.0 - gamma),
    };
    if !(denom.is_finite() && denom > 0.0) {
        return Err(invalid(format!("step bound denominator must be positive, got {denom}")));
    }
    let numer = match kind {
        BoundKind::NgaObjective => f_max,
        BoundKind::SpngaIterates => 2.0 * f_max,
        BoundKind::SpameIterates => 4.0 * f_max,
        BoundKind::SpameStatement => 8.0 * f_max,
    };
    Ok((numer / denom).ceil() as u64)
}

impl ConvergenceTrace {
    pub fn algorithm(&self) -> Algorithm {
        self.config.algorithm
    }

    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_objective(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.f_value)
    }

    pub fn objective_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.f_value).collect()
    }

    pub fn bilinear_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.bilinear_value).collect()
    }

    /// `tau0` over the iterates produced by the U-step (`k >= 1`).
    pub fn tau0_observed(&self) -> Option<f64> {
        self.records
            .iter()
            .skip(1)
            .filter_map(|r| r.min_nonzero_proj)
            .min_by(f64::total_cmp)
    }

    /// `tau1`: smallest nonzero projection of the final iterate.
    pub fn tau1(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.min_nonzero_proj)
    }

    /// Smallest `lambda_min` of the H-factors of `X S^k` over the run.
    pub fn lambda_min_over_trace(&self) -> f64 {
        self.records.iter().map(|r| r.lambda_min_h).fold(f64::INFINITY, f64::min)
    }

    /// First record whose `X S^k` is rank deficient, if any.
    pub fn first_rank_deficient(&self) -> Option<usize> {
        self.records.iter().find(|r| r.rank_xs < self.shape.k).map(|r| r.k)
    }

    /// The step whose freeze the algorithm's bound speaks about.
    fn observed_for_bound(&self, kind: BoundKind, t: &RecomputedTerminal) -> Option<usize> {
        match kind {
            BoundKind::NgaObjective => t.obj_freeze_step,
            _ => t.s_freeze_step,
        }
    }

    fn bound_kind(&self) -> Option<BoundKind> {
        match self.config.algorithm {
            Algorithm::Nga => Some(BoundKind::NgaObjective),
            Algorithm::Spnga => Some(BoundKind::SpngaIterates),
            Algorithm::Spame => Some(BoundKind::SpameStatement),
            Algorithm::Pame => None,
        }
    }

    /// Evaluates the algorithm's step bound for a known `F^max` and stores
    /// the verdict in the terminal block. PAMe has no finite-step bound.
    pub fn attach_bounds(&mut self, f_max: f64) -> Result<Option<&BoundCheck>> {
        let check = self.compute_bounds(f_max, &self.recompute_freezes())?;
        match self.terminal.as_mut() {
            Some(t) => {
                t.bounds = check;
                Ok(t.bounds.as_ref())
            }
            None => Ok(None),
        }
    }

    fn compute_bounds(&self, f_max: f64, freezes: &RecomputedTerminal) -> Result<Option<BoundCheck>> {
        let Some(kind) = self.bound_kind() else {
            return Ok(None);
        };
        let c = &self.config;
        let tau0 = match kind {
            BoundKind::NgaObjective => match self.tau0_observed() {
                Some(t) => t,
                None => return Ok(None),
            },
            _ => 0.0,
        };
        let theoretical = step_bound(kind, f_max, c.tau, tau0, c.gamma)?;
        let observed = self.observed_for_bound(kind, freezes);
        let within = |b: u64| observed.is_some_and(|o| o as u64 <= b);
        let (proof_bound, proof_bound_satisfied) = if kind == BoundKind::SpameStatement {
            let b = step_bound(BoundKind::SpameIterates, f_max, c.tau, 0.0, c.gamma)?;
            (Some(b), Some(within(b)))
        } else {
            (None, None)
        };
        Ok(Some(BoundCheck {
            kind,
            f_max,
            theoretical,
            observed,
            satisfied: within(theoretical),
            proof_bound,
            proof_bound_satisfied,
        }))
    }

    fn recompute_freezes(&self) -> RecomputedTerminal {
        let recs = &self.records;
        let last = recs.len().saturating_sub(1);
        let stop = self.terminal.as_ref().map(|t| t.stop_reason);
        let mut out = RecomputedTerminal { s_freeze_step: None, u_freeze_step: None, obj_freeze_step: None, bound_satisfied: None };
        if stop.is_none() || stop == Some(StopReason::MaxIter) {
            return out;
        }
        // Start of the final run of unchanged sign matrices.
        let tail_start = recs.iter().rposition(|r| r.s_changed).unwrap_or(0);
        match self.config.algorithm {
            Algorithm::Nga => {
                let m = recs
                    .iter()
                    .position(|r| r.cross_value.is_some_and(|c| c.to_bits() == r.bilinear_value.to_bits()));
                out.obj_freeze_step = m;
                if let Some(m) = m {
                    if !recs[m].s_changed {
                        out.u_freeze_step = Some(m);
                    }
                }
            }
            Algorithm::Spnga => {
                let kp = last.saturating_sub(self.freeze_window);
                out.s_freeze_step = Some(kp);
                out.u_freeze_step = Some(kp + 1);
            }
            Algorithm::Pame => {
                out.s_freeze_step = Some(tail_start);
                out.u_freeze_step = Some(last);
            }
            Algorithm::Spame => {
                let kp = last.saturating_sub(self.freeze_window);
                out.s_freeze_step = Some(kp);
                out.u_freeze_step = Some(kp);
            }
        }
        out
    }

    /// Re-derives freeze steps and the bound verdict from the records
    /// alone, for cross-checking the values written during the run.
    pub fn recomputed_terminal(&self) -> RecomputedTerminal {
        let mut out = self.recompute_freezes();
        if let Some(b) = self.terminal.as_ref().and_then(|t| t.bounds.as_ref()) {
            out.bound_satisfied = self.compute_bounds(b.f_max, &out).ok().flatten().map(|c| c.satisfied);
        }
        out
    }

    /// Whether the stored terminal block agrees with [`Self::recomputed_terminal`].
    pub fn verdicts_agree(&self) -> bool {
        let Some(t) = &self.terminal else {
            return true;
        };
        let r = self.recomputed_terminal();
        r.s_freeze_step == t.s_freeze_step
            && r.u_freeze_step == t.u_freeze_step
            && r.obj_freeze_step == t.obj_freeze_step
            && r.bound_satisfied == t.bounds.as_ref().map(|b| b.satisfied)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: ConvergenceTrace = serde_json::from_str(s)?;
        if t.schema != TRACE_SCHEMA {
            return Err(invalid(format!("unsupported trace schema '{}'", t.schema)));
        }
        Ok(t)
    }

    /// Plot-ready table with header `k,F,bilinear,s_changed,u_delta`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "F", "bilinear", "s_changed", "u_delta"]).map_err(csv_err)?;
        for r in &self.records {
            w.write_record([
                r.k.to_string(),
                r.f_value.to_string(),
                r.bilinear_value.to_string(),
                r.s_changed.to_string(),
                r.u_delta.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| L1PcaError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
    }
}

fn csv_err(e: csv::Error) -> L1PcaError {
    L1PcaError::Io(std::io::Error::other(e))
}

/// Largest ratio of successive optimality gaps before the objective freeze:
/// `max_k (F* - F^{k+1}) / (F* - F^k)` over `k = 0..m-2` with `F* = F^m`.
pub fn estimate_rho(trace: &ConvergenceTrace) -> Result<f64> {
    let m = trace
        .terminal
        .as_ref()
        .and_then(|t| t.obj_freeze_step)
        .ok_or_else(|| L1PcaError::NotEnoughData("trace has no objective freeze".into()))?;
    if m < 2 {
        return Err(L1PcaError::NotEnoughData(format!("objective froze at step {m}, need >= 2")));
    }
    let f: Vec<f64> = trace.records[..=m].iter().map(|r| r.f_value).collect();
    let f_star = f[m];
    let mut rho = f64::NEG_INFINITY;
    for k in 0..=(m - 2) {
        let den = f_star - f[k];
        if den <= 0.0 {
            return Err(L1PcaError::NotEnoughData(format!("optimality gap vanished at step {k}")));
        }
        rho = rho.max((f_star - f[k + 1]) / den);
    }
    Ok(rho)
}
