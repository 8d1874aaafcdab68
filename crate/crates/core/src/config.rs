//! Problem description shared by the `reduced` and `spectrum` commands.
//! TOML or JSON, chosen by file extension. A JSON file written by
//! `spectrum --json` is accepted as well: its `config` member is used.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liegen::{HalfInt, RotRep};
use crate::reduced::{
    build_reduced_hamiltonian, AffineModel, AxisRange, GridSpec, ModelKind, Potential, ReducedHamiltonian,
    RelativeAxis,
};
use crate::spectra::SolverOptions;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub n: usize,
    #[serde(rename = "A", default)]
    pub a: f64,
    #[serde(rename = "B", default)]
    pub b: f64,
    #[serde(rename = "I", default)]
    pub i: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

/// Twice the spin labels for `n = 3` (also usable on `n = 2` grids, where
/// only `S_12` enters), or integer weights for planar `n = 2` representations.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twice_s: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twice_j: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_s: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_j: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub chamber_margin: f64,
    #[serde(default)]
    pub sl_constraint: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<AxisRange>,
    #[serde(default)]
    pub relative: Vec<RelativeAxis>,
    #[serde(default)]
    pub flat_measure: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub reps: RepsConfig,
    pub grid: GridConfig,
    #[serde(default = "no_potential")]
    pub potential: Potential,
    #[serde(default)]
    pub solver: SolverOptions,
}

fn no_potential() -> Potential {
    Potential::None
}

impl ProblemConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml(&text),
            Some("json") => Self::from_json(&text),
            _ => Err(Error::Config(format!(
                "{}: expected a .toml or .json extension",
                path.display()
            ))),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let inner = match v.get("config") {
            Some(c) if v.get("model").is_none() => c.clone(),
            _ => v,
        };
        serde_json::from_value(inner).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn affine_model(&self) -> AffineModel<f64> {
        let m = &self.model;
        AffineModel {
            kind: m.kind,
            n: m.n,
            a: m.a,
            b: m.b,
            i: m.i,
            hbar: m.hbar,
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        let g = &self.grid;
        GridSpec {
            n: self.model.n,
            chamber_margin: g.chamber_margin,
            sl_constraint: g.sl_constraint,
            trace: g.trace,
            relative: g.relative.clone(),
            flat_measure: g.flat_measure,
        }
    }

    pub fn reps(&self) -> Result<(RotRep<f64>, RotRep<f64>)> {
        let r = &self.reps;
        let hbar = self.model.hbar;
        let pick = |twice: Option<u32>, weight: Option<i64>, side: &str| -> Result<RotRep<f64>> {
            match (twice, weight) {
                (Some(_), Some(_)) => Err(Error::Config(format!("give either twice_{side} or weight_{side}, not both"))),
                (_, Some(m)) if self.model.n == 2 => Ok(RotRep::planar(m, hbar)),
                (_, Some(_)) => Err(Error::Config("planar weights require n = 2".into())),
                (t, None) => Ok(RotRep::spin(HalfInt::from_twice(t.unwrap_or(0)), hbar)),
            }
        };
        Ok((pick(r.twice_s, r.weight_s, "s")?, pick(r.twice_j, r.weight_j, "j")?))
    }

    pub fn build(&self) -> Result<ReducedHamiltonian> {
        let (s, j) = self.reps()?;
        build_reduced_hamiltonian(&self.affine_model(), &s, &j, &self.grid_spec(), &self.potential)
    }

    /// Same problem on a box enlarged by `factor` at fixed spacing.
    pub fn scaled(&self, factor: f64) -> ProblemConfig {
        let linear = self.model.kind == ModelKind::DAlembert;
        let g = self.grid_spec().scaled(factor, linear);
        ProblemConfig {
            grid: GridConfig {
                trace: g.trace,
                relative: g.relative,
                ..self.grid.clone()
            },
            ..self.clone()
        }
    }
}
