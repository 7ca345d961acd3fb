use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, L1PcaError, Result};
use crate::polar_core::{DataMatrix, DenseMatrix, SignMatrix, StiefelMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Nga,
    Spnga,
    Pame,
    Spame,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Nga, Algorithm::Spnga, Algorithm::Pame, Algorithm::Spame];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Nga => "nga",
            Algorithm::Spnga => "spnga",
            Algorithm::Pame => "pame",
            Algorithm::Spame => "spame",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = L1PcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "nga" => Ok(Algorithm::Nga),
            "spnga" => Ok(Algorithm::Spnga),
            "pame" => Ok(Algorithm::Pame),
            "spame" => Ok(Algorithm::Spame),
            other => Err(invalid(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    SFrozen,
    UFrozen,
    ObjectiveFrozen,
    MaxIter,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StopReason::SFrozen => "s-frozen",
            StopReason::UFrozen => "u-frozen",
            StopReason::ObjectiveFrozen => "objective-frozen",
            StopReason::MaxIter => "max-iter",
        };
        f.pad(s)
    }
}

/// Parameters of one solver run.
///
/// `max_iter` and `freeze_window` default per algorithm when `None`; see
/// [`SolverConfig::effective_max_iter`] and [`SolverConfig::effective_freeze_window`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub tau: f64,
    pub beta: f64,
    pub gamma: f64,
    pub max_iter: Option<usize>,
    /// Number of consecutive steps with unchanged S that declares a freeze.
    pub freeze_window: Option<usize>,
    pub seed: u64,
}

/// Cap applied to the data-derived iteration budget.
pub const MAX_ITER_CAP: usize = 1_000_000;
/// Budget used when no proximal weight bounds the run length.
pub const NGA_DEFAULT_MAX_ITER: usize = 10_000;

impl SolverConfig {
    pub fn nga() -> Self {
        Self { algorithm: Algorithm::Nga, tau: 0.0, beta: 0.0, gamma: 0.0, max_iter: None, freeze_window: None, seed: 0 }
    }

    pub fn spnga(tau: f64) -> Self {
        Self { algorithm: Algorithm::Spnga, tau, ..Self::nga() }
    }

    pub fn pame(tau: f64, beta: f64, gamma: f64) -> Self {
        Self { algorithm: Algorithm::Pame, tau, beta, gamma, ..Self::nga() }
    }

    pub fn spame(tau: f64, gamma: f64) -> Self {
        Self { algorithm: Algorithm::Spame, tau, gamma, ..Self::nga() }
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = Some(max_iter);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks the parameter ranges each algorithm requires.
    pub fn validate(&self) -> Result<()> {
        self.validate_ranges()?;
        match self.algorithm {
            Algorithm::Nga => {}
            Algorithm::Spnga | Algorithm::Spame => {
                if self.tau <= 0.0 {
                    return Err(invalid(format!("{} requires tau > 0", self.algorithm)));
                }
            }
            Algorithm::Pame => {
                if self.tau <= 0.0 || self.beta <= 0.0 {
                    return Err(invalid("pame requires tau > 0 and beta > 0"));
                }
            }
        }
        Ok(())
    }

    /// Range checks only: finite, nonnegative weights and `gamma` in `[0, 1)`.
    pub fn validate_ranges(&self) -> Result<()> {
        for (name, v) in [("tau", self.tau), ("beta", self.beta), ("gamma", self.gamma)] {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.gamma >= 1.0 {
            return Err(invalid(format!("gamma must lie in [0, 1), got {}", self.gamma)));
        }
        if self.max_iter == Some(0) {
            return Err(invalid("max_iter must be positive"));
        }
        if self.freeze_window == Some(0) {
            return Err(invalid("freeze_window must be positive"));
        }
        Ok(())
    }

    pub fn effective_freeze_window(&self) -> usize {
        self.freeze_window.unwrap_or(match self.algorithm {
            // Three equal consecutive sign matrices, i.e. two unchanged steps.
            Algorithm::Spame => 2,
            _ => 1,
        })
    }

    /// `10 * ceil(4 F_hat / (tau (1 - gamma)))` with
    /// `F_hat = sqrt(K) * sum_i ||x_i||_2 >= F^max`, capped at [`MAX_ITER_CAP`].
    pub fn effective_max_iter(&self, x: &DataMatrix, k: usize) -> usize {
        if let Some(m) = self.max_iter {
            return m;
        }
        if self.algorithm == Algorithm::Nga || self.tau <= 0.0 {
            return NGA_DEFAULT_MAX_ITER;
        }
        let f_hat = (k as f64).sqrt() * x.column_norms().iter().sum::<f64>();
        let bound = (4.0 * f_hat / (self.tau * (1.0 - self.gamma))).ceil();
        let budget = 10.0 * bound.max(1.0);
        if budget >= MAX_ITER_CAP as f64 {
            MAX_ITER_CAP
        } else {
            budget as usize
        }
    }
}

/// Run-level switches that are not part of the algorithm definition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Keep every `(U^k, S^k)` in the trace.
    pub record_iterates: bool,
    /// Accept zero `tau`/`beta` for the proximal variants (range checks
    /// still apply). Needed to run PAMe as plain NGA.
    pub allow_degenerate_params: bool,
}

/// Iterate of a solver: `U^k`, `S^k`, and for the PAMe family `U^{k-1}` and
/// the extrapolated point `E^k`.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub u: StiefelMatrix,
    pub s: SignMatrix,
    pub u_prev: StiefelMatrix,
    pub e: DenseMatrix,
    pub k: usize,
}

impl SolverState {
    /// `S^0 = sgn(X^T U^0)`, `E^0 = U^0`, `U^{-1} = U^0`.
    pub fn initial(x: &DataMatrix, u0: &StiefelMatrix) -> Result<Self> {
        let v = x.t_matmul(u0.as_matrix())?;
        let s = crate::polar_core::sgn_matrix(&v)?;
        Ok(Self { u: u0.clone(), s, u_prev: u0.clone(), e: u0.as_matrix().clone(), k: 0 })
    }

    /// Rebuilds a PAMe-family state from two consecutive iterates.
    pub fn resume(u: StiefelMatrix, u_prev: StiefelMatrix, s: SignMatrix, gamma: f64) -> Result<Self> {
        let e = crate::solvers::steps::extrapolate(&u, &u_prev, gamma)?;
        Ok(Self { u, s, u_prev, e, k: 0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rules() {
        assert!(SolverConfig::nga().validate().is_ok());
        assert!(SolverConfig::spnga(0.0).validate().is_err());
        assert!(SolverConfig::pame(1.0, 0.0, 0.1).validate().is_err());
        assert!(SolverConfig::pame(1.0, 1.0, 1.0).validate().is_err());
        assert!(SolverConfig::spame(1.0, -0.1).validate().is_err());
        assert!(SolverConfig::pame(0.0, 0.0, 0.0).validate_ranges().is_ok());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("S-PAMe".parse::<Algorithm>().unwrap(), Algorithm::Spame);
    }

    #[test]
    fn default_windows() {
        assert_eq!(SolverConfig::spame(1.0, 0.0).effective_freeze_window(), 2);
        assert_eq!(SolverConfig::spnga(1.0).effective_freeze_window(), 1);
    }
}
