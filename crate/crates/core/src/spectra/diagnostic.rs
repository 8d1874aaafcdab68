//! Box-size drift of the low spectrum. Localized states do not feel the box
//! once it is large enough; states of a continuum keep sinking as it grows.
//! This is a numerical heuristic, not a classification theorem.

use serde::Serialize;

use super::{eigen_lowest, SolverOptions};
use crate::config::ProblemConfig;
use crate::error::{Error, Result};

pub const BOUND_DRIFT: f64 = 1e-4;

pub const HEURISTIC_NOTE: &str = "heuristic: bound-like = relative drift below 1e-4 across box scales; \
     continuum-like = energy decreasing strictly as the box grows; no rigorous classification";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftFlag {
    BoundLike,
    ContinuumLike,
    Indeterminate,
}

impl DriftFlag {
    pub fn name(self) -> &'static str {
        match self {
            DriftFlag::BoundLike => "bound-like",
            DriftFlag::ContinuumLike => "continuum-like",
            DriftFlag::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftRow {
    pub index: usize,
    /// One energy per box scale, in scale order.
    pub energies: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Largest relative change between consecutive scales.
    pub drift: f64,
    pub flag: DriftFlag,
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    pub scales: Vec<f64>,
    pub rows: Vec<DriftRow>,
    pub heuristic: &'static str,
}

pub fn bound_state_diagnostic(cfg: &ProblemConfig, k: usize, scales: &[f64]) -> Result<DriftReport> {
    if scales.len() < 2 {
        return Err(Error::InvalidArgument("box scan needs at least two scales".into()));
    }
    if let Some(s) = scales.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidArgument(format!("box scale must be positive, got {s}")));
    }
    let opts: &SolverOptions = &cfg.solver;
    let mut per_scale = Vec::with_capacity(scales.len());
    for &s in scales {
        let h = cfg.scaled(s).build()?;
        per_scale.push(eigen_lowest(&h, k, opts)?);
    }
    let rows = (0..k)
        .map(|i| {
            let energies: Vec<f64> = per_scale.iter().map(|r| r.eigenvalues[i]).collect();
            let residuals = per_scale.iter().map(|r| r.residuals[i]).collect();
            let drift = energies
                .windows(2)
                .map(|w| {
                    let denom = if w[0] == 0.0 { 1.0 } else { w[0].abs() };
                    (w[1] - w[0]).abs() / denom
                })
                .fold(0.0, f64::max);
            let flag = if drift < BOUND_DRIFT {
                DriftFlag::BoundLike
            } else if energies.windows(2).all(|w| w[1] < w[0]) {
                DriftFlag::ContinuumLike
            } else {
                DriftFlag::Indeterminate
            };
            DriftRow {
                index: i,
                energies,
                residuals,
                drift,
                flag,
            }
        })
        .collect();
    Ok(DriftReport {
        scales: scales.to_vec(),
        rows,
        heuristic: HEURISTIC_NOTE,
    })
}
