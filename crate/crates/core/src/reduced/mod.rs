//! Reduced Hamiltonians `H^{sj}` for matrix amplitudes `f^{sj}` on the
//! deformation invariants, discretized on a box inside the Weyl chamber.
//!
//! Coordinates: the affine-invariant models use `(q, x_1..x_{n-1})` with
//! `q` the mean of `q^a` and `x_b = q^b - q^{b+1}`; the d'Alembert model
//! uses `(Q^n, x_1..x_{n-1})` with `x_b = Q^b - Q^{b+1}`. In both charts
//! the chamber is an orthant `x_b > 0`, so the ε-offset wall is the lower
//! face of each relative axis.

mod assemble;
mod grid;

pub use assemble::{build_reduced_hamiltonian, kinetic_coefficients, ReducedHamiltonian};
pub use grid::{Axis, AxisRange, Chart, Grid, GridSpec, RelativeAxis};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liegen::{Halfness, RotRep};
use crate::scalar::{creal, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "aff-aff")]
    AffAff,
    #[serde(rename = "met-aff")]
    MetAff,
    #[serde(rename = "aff-met")]
    AffMet,
    #[serde(rename = "d-alembert")]
    DAlembert,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::AffAff,
        ModelKind::MetAff,
        ModelKind::AffMet,
        ModelKind::DAlembert,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::AffAff => "aff-aff",
            ModelKind::MetAff => "met-aff",
            ModelKind::AffMet => "aff-met",
            ModelKind::DAlembert => "d-alembert",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidModel(format!("unknown model kind '{s}'")))
    }
}

/// Kinetic model constants. Unused constants are ignored by the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineModel<T> {
    pub kind: ModelKind,
    pub n: usize,
    pub a: T,
    pub b: T,
    pub i: T,
    pub hbar: T,
}

impl<T: Real> AffineModel<T> {
    pub fn aff_aff(n: usize, a: T, b: T, hbar: T) -> Self {
        AffineModel {
            kind: ModelKind::AffAff,
            n,
            a,
            b,
            i: T::zero(),
            hbar,
        }
    }

    pub fn d_alembert(n: usize, i: T, hbar: T) -> Self {
        AffineModel {
            kind: ModelKind::DAlembert,
            n,
            a: T::zero(),
            b: T::zero(),
            i,
            hbar,
        }
    }

    pub fn with_kind(self, kind: ModelKind) -> Self {
        AffineModel { kind, ..self }
    }

    /// The constant playing the role of `A` in the affine-affine template:
    /// `A` itself, or `I + A` for the metric-affine and affine-metric models.
    pub fn effective_a(&self) -> T {
        match self.kind {
            ModelKind::MetAff | ModelKind::AffMet => self.i + self.a,
            _ => self.a,
        }
    }

    /// `I / (2 (I^2 - A^2))`, zero for the other models.
    pub fn casimir_shift_coefficient(&self) -> T {
        match self.kind {
            ModelKind::MetAff | ModelKind::AffMet => {
                self.i / (T::lit(2.0) * (self.i * self.i - self.a * self.a))
            }
            _ => T::zero(),
        }
    }

    /// The `A -> I + A` affine-affine model with the same `B`.
    pub fn affine_template(&self) -> Self {
        AffineModel::aff_aff(self.n, self.effective_a(), self.b, self.hbar)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidModel(m.to_string()));
        if self.n == 0 {
            return Err(Error::UnsupportedDimension(self.n));
        }
        let finite = [self.a, self.b, self.i, self.hbar].iter().all(|x| x.is_finite());
        if !finite {
            return bad("model constants must be finite");
        }
        if !(self.hbar > T::zero()) {
            return bad("hbar must be positive");
        }
        let nn = T::from_usize_lossy(self.n);
        match self.kind {
            ModelKind::DAlembert => {
                if !(self.i > T::zero()) {
                    return bad("d'Alembert model needs I > 0");
                }
            }
            kind => {
                if kind != ModelKind::AffAff && self.i * self.i == self.a * self.a {
                    return bad("I^2 = A^2 makes the Casimir shift singular");
                }
                let a = self.effective_a();
                if a == T::zero() {
                    return bad("effective A must be nonzero");
                }
                if a + nn * self.b == T::zero() {
                    return bad("A + nB must be nonzero");
                }
            }
        }
        Ok(())
    }
}

/// `mu = n (A + n B)` with `A -> I + A` where applicable, so that the
/// trace mode carries kinetic term `-(hbar^2 / 2 mu) d^2/dq^2`.
pub fn dilatation_effective_mass<T: Real>(model: &AffineModel<T>) -> Result<T> {
    if model.kind == ModelKind::DAlembert {
        return Err(Error::InvalidModel(
            "d'Alembert model has no logarithmic trace mode".into(),
        ));
    }
    let n = T::from_usize_lossy(model.n);
    Ok(n * (model.effective_a() + n * model.b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Potential {
    None,
    /// `(kappa / 2) q^2` on the mean logarithmic invariant.
    Harmonic { kappa: f64 },
    /// Nodes with `q` outside `(lo, hi)` are removed (Dirichlet).
    Well { lo: f64, hi: f64 },
}

impl Potential {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Potential::None => Ok(()),
            Potential::Harmonic { kappa } if kappa > 0.0 && kappa.is_finite() => Ok(()),
            Potential::Harmonic { kappa } => {
                Err(Error::InvalidPotential(format!("kappa must be positive, got {kappa}")))
            }
            Potential::Well { lo, hi } if lo < hi => Ok(()),
            Potential::Well { lo, hi } => {
                Err(Error::InvalidPotential(format!("well bounds must be ordered, got ({lo}, {hi})")))
            }
        }
    }

    pub fn value(&self, qbar: f64) -> f64 {
        match *self {
            Potential::Harmonic { kappa } => 0.5 * kappa * qbar * qbar,
            _ => 0.0,
        }
    }

    pub fn admits(&self, qbar: f64) -> bool {
        match *self {
            Potential::Well { lo, hi } => qbar > lo && qbar < hi,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Superselection {
    SingleValued,
    DoubleValued,
    Invalid,
}

/// `(s, j)` may be combined only when `j - s` is an integer.
pub fn superselection_valid<T: Real>(rep_s: &RotRep<T>, rep_j: &RotRep<T>) -> Superselection {
    match (rep_s.label().halfness(), rep_j.label().halfness()) {
        (Halfness::Integer, Halfness::Integer) => Superselection::SingleValued,
        (Halfness::HalfOdd, Halfness::HalfOdd) => Superselection::DoubleValued,
        _ => Superselection::Invalid,
    }
}

/// `(X_-, X_+)` on the flattened fiber, `X_∓ f = f S^j_ab ∓ S^s_ab f`.
/// Amplitudes are flattened row-major: entry `(m, k)` sits at `m (2j+1) + k`.
pub fn build_coupling_ops<T: Real>(
    rep_s: &RotRep<T>,
    rep_j: &RotRep<T>,
    a: usize,
    b: usize,
) -> Result<(DMatrix<C<T>>, DMatrix<C<T>>)> {
    if a == b {
        return Err(Error::SameAxis(a));
    }
    if rep_s.n() != rep_j.n() {
        return Err(Error::InvalidArgument(format!(
            "representations act in different dimensions ({} and {})",
            rep_s.n(),
            rep_j.n()
        )));
    }
    let ss = rep_s.pair(a, b)?;
    let sj = rep_j.pair(a, b)?;
    let right = DMatrix::<C<T>>::identity(ss.nrows(), ss.nrows()).kronecker(&sj.transpose());
    let left = ss.kronecker(&DMatrix::<C<T>>::identity(sj.nrows(), sj.nrows()));
    Ok((&right - &left, right + left))
}

/// `(M + M^H) / 2`, hermitian to the last bit.
pub(crate) fn hermitize<T: Real>(m: &DMatrix<C<T>>) -> DMatrix<C<T>> {
    let half = creal(T::lit(0.5));
    (m + m.adjoint()).map(|z| z * half)
}
