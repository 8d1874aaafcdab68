//! Wave functions on SU(2) stored as Peter-Weyl coefficient matrices,
//! `psi(u) = sum_j Tr(c^j D^j(u))`.
//!
//! Functions are never gridded on the group; values are synthesized on
//! demand and regular translations act on the coefficients directly.

use std::collections::BTreeMap;

use nalgebra::{ComplexField, DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liegen::{wigner_d, HalfInt, RotRep};
use crate::scalar::{cplx, creal, Real, C};

/// Finite Peter-Weyl expansion. Absent labels mean `c^j = 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PwCoeffs<T: Real> {
    terms: BTreeMap<HalfInt, DMatrix<C<T>>>,
}

/// Superselection sector of an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityClass {
    Bosonic,
    Fermionic,
    /// Integer and half-odd labels superposed; `|psi|^2` does not descend to SO(3).
    Mixed,
    Zero,
}

impl std::fmt::Display for ParityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ParityClass::Bosonic => "bosonic",
            ParityClass::Fermionic => "fermionic",
            ParityClass::Mixed => "mixed",
            ParityClass::Zero => "zero",
        };
        f.write_str(s)
    }
}

impl<T: Real> PwCoeffs<T> {
    pub fn new() -> Self {
        PwCoeffs {
            terms: BTreeMap::new(),
        }
    }

    /// Sets `c^j`; the block must be `(2j+1) x (2j+1)`.
    pub fn insert(&mut self, j: HalfInt, c: DMatrix<C<T>>) -> Result<()> {
        let expected = j.dim();
        if c.nrows() != expected || c.ncols() != expected {
            return Err(Error::CoefficientShape {
                twice_j: j.twice(),
                rows: c.nrows(),
                cols: c.ncols(),
                expected,
            });
        }
        self.terms.insert(j, c);
        Ok(())
    }

    pub fn with(mut self, j: HalfInt, c: DMatrix<C<T>>) -> Result<Self> {
        self.insert(j, c)?;
        Ok(self)
    }

    pub fn get(&self, j: HalfInt) -> Option<&DMatrix<C<T>>> {
        self.terms.get(&j)
    }

    pub fn iter(&self) -> impl Iterator<Item = (HalfInt, &DMatrix<C<T>>)> {
        self.terms.iter().map(|(j, c)| (*j, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Linear combination `alpha * self + beta * other`.
    pub fn combine(&self, alpha: C<T>, other: &Self, beta: C<T>) -> Self {
        let mut out = BTreeMap::new();
        for j in self.terms.keys().chain(other.terms.keys()) {
            if out.contains_key(j) {
                continue;
            }
            let zero = DMatrix::from_element(j.dim(), j.dim(), creal(T::zero()));
            let a = self.terms.get(j).unwrap_or(&zero);
            let b = other.terms.get(j).unwrap_or(&zero);
            out.insert(*j, a.map(|z| z * alpha) + b.map(|z| z * beta));
        }
        PwCoeffs { terms: out }
    }

    fn map_terms<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(HalfInt, &DMatrix<C<T>>) -> Result<DMatrix<C<T>>>,
    {
        let mut terms = BTreeMap::new();
        for (j, c) in &self.terms {
            terms.insert(*j, f(*j, c)?);
        }
        Ok(PwCoeffs { terms })
    }
}

fn unit_rep<T: Real>(j: HalfInt) -> RotRep<T> {
    RotRep::spin(j, T::one())
}

/// `psi(u(k)) = sum_j Tr(c^j D^j(u(k)))`.
pub fn synth<T: Real>(coeffs: &PwCoeffs<T>, k: &Vector3<T>) -> Result<C<T>> {
    let mut acc = creal(T::zero());
    for (j, c) in coeffs.iter() {
        let d = wigner_d(&unit_rep::<T>(j), k)?;
        acc += (c * d).trace();
    }
    Ok(acc)
}

/// Coefficients of `psi'(u) = psi(v u)`: `c^j -> c^j D^j(v)`.
pub fn left_translate<T: Real>(coeffs: &PwCoeffs<T>, v: &Vector3<T>) -> Result<PwCoeffs<T>> {
    coeffs.map_terms(|j, c| Ok(c * wigner_d(&unit_rep::<T>(j), v)?))
}

/// Coefficients of `psi'(u) = psi(u v)`: `c^j -> D^j(v) c^j`.
pub fn right_translate<T: Real>(coeffs: &PwCoeffs<T>, v: &Vector3<T>) -> Result<PwCoeffs<T>> {
    coeffs.map_terms(|j, c| Ok(wigner_d(&unit_rep::<T>(j), v)? * c))
}

/// Classifies by the halfness of the labels carrying nonzero blocks.
pub fn parity_class<T: Real>(coeffs: &PwCoeffs<T>) -> ParityClass {
    let mut integer = false;
    let mut half_odd = false;
    for (j, c) in coeffs.iter() {
        if c.iter().all(|z| z.modulus() == T::zero()) {
            continue;
        }
        if j.is_integer() {
            integer = true;
        } else {
            half_odd = true;
        }
    }
    match (integer, half_odd) {
        (false, false) => ParityClass::Zero,
        (true, false) => ParityClass::Bosonic,
        (false, true) => ParityClass::Fermionic,
        (true, true) => ParityClass::Mixed,
    }
}

/// One term of the coefficient file: `[{"twice_j": 1, "re": [[..]], "im": [[..]]}, ...]`.
/// `im` may be omitted for real blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwTermRecord {
    pub twice_j: u32,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl PwCoeffs<f64> {
    pub fn from_records(records: &[PwTermRecord]) -> Result<Self> {
        let mut out = PwCoeffs::new();
        for rec in records {
            let j = HalfInt::from_twice(rec.twice_j);
            let rows = rec.re.len();
            let cols = rec.re.first().map_or(0, Vec::len);
            let shape_err = || Error::CoefficientShape {
                twice_j: rec.twice_j,
                rows,
                cols,
                expected: j.dim(),
            };
            if rec.re.iter().any(|r| r.len() != cols) {
                return Err(shape_err());
            }
            if let Some(im) = &rec.im {
                if im.len() != rows || im.iter().any(|r| r.len() != cols) {
                    return Err(shape_err());
                }
            }
            let m = DMatrix::from_fn(rows, cols, |r, c| {
                let im = rec.im.as_ref().map_or(0.0, |im| im[r][c]);
                cplx(rec.re[r][c], im)
            });
            if out.terms.contains_key(&j) {
                return Err(Error::InvalidArgument(format!("duplicate twice_j = {}", rec.twice_j)));
            }
            out.insert(j, m)?;
        }
        Ok(out)
    }

    pub fn to_records(&self) -> Vec<PwTermRecord> {
        self.iter()
            .map(|(j, c)| PwTermRecord {
                twice_j: j.twice(),
                re: (0..c.nrows()).map(|r| (0..c.ncols()).map(|k| c[(r, k)].re).collect()).collect(),
                im: Some(
                    (0..c.nrows()).map(|r| (0..c.ncols()).map(|k| c[(r, k)].im).collect()).collect(),
                ),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn id(j: HalfInt) -> DMatrix<C<f64>> {
        DMatrix::identity(j.dim(), j.dim())
    }

    #[test]
    fn constant_function() {
        let c = PwCoeffs::new().with(HalfInt::ZERO, id(HalfInt::ZERO)).unwrap();
        for k in [Vector3::zeros(), Vector3::new(1.0, 2.0, -0.5)] {
            let v = synth(&c, &k).unwrap();
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn spin_half_trace_at_identity_and_full_turn() {
        let c = PwCoeffs::new().with(HalfInt::HALF, id(HalfInt::HALF)).unwrap();
        assert_abs_diff_eq!(synth(&c, &Vector3::zeros()).unwrap().re, 2.0, epsilon = 1e-15);
        let turn = Vector3::new(0.0, 0.0, std::f64::consts::TAU);
        assert_abs_diff_eq!(synth(&c, &turn).unwrap().re, -2.0, epsilon = 1e-12);
    }

    #[test]
    fn translation_by_identity_is_trivial() {
        let c = PwCoeffs::new()
            .with(HalfInt::ONE, DMatrix::from_fn(3, 3, |r, k| cplx(r as f64, k as f64)))
            .unwrap();
        let l = left_translate(&c, &Vector3::zeros()).unwrap();
        let r = right_translate(&c, &Vector3::zeros()).unwrap();
        for t in [l, r] {
            let d = t.get(HalfInt::ONE).unwrap() - c.get(HalfInt::ONE).unwrap();
            assert!(d.iter().all(|z| z.modulus() < 1e-14));
        }
    }

    #[test]
    fn identity_coefficients_translate_to_wigner_matrix() {
        let c = PwCoeffs::new().with(HalfInt::HALF, id(HalfInt::HALF)).unwrap();
        let v = Vector3::new(0.4, -0.2, 1.3);
        let l = left_translate(&c, &v).unwrap();
        let vmat = wigner_d(&RotRep::spin(HalfInt::HALF, 1.0), &v).unwrap();
        let d = l.get(HalfInt::HALF).unwrap() - vmat;
        assert!(d.iter().all(|z| z.modulus() < 1e-15));
    }

    #[test]
    fn parity_classes() {
        let half = HalfInt::HALF;
        let three_half = HalfInt::from_twice(3);
        let c = PwCoeffs::new().with(half, id(half)).unwrap().with(three_half, id(three_half)).unwrap();
        assert_eq!(parity_class(&c), ParityClass::Fermionic);
        let two = HalfInt::from_int(2);
        let c = PwCoeffs::new().with(HalfInt::ZERO, id(HalfInt::ZERO)).unwrap().with(two, id(two)).unwrap();
        assert_eq!(parity_class(&c), ParityClass::Bosonic);
        let c = PwCoeffs::new().with(HalfInt::ZERO, id(HalfInt::ZERO)).unwrap().with(half, id(half)).unwrap();
        assert_eq!(parity_class(&c), ParityClass::Mixed);
        assert_eq!(parity_class(&PwCoeffs::<f64>::new()), ParityClass::Zero);
        // explicit zero blocks do not count
        let c = PwCoeffs::new()
            .with(HalfInt::ZERO, id(HalfInt::ZERO))
            .unwrap()
            .with(half, DMatrix::zeros(2, 2))
            .unwrap();
        assert_eq!(parity_class(&c), ParityClass::Bosonic);
    }

    #[test]
    fn shape_is_checked() {
        let mut c = PwCoeffs::<f64>::new();
        let err = c.insert(HalfInt::ONE, DMatrix::zeros(2, 2)).unwrap_err();
        assert!(matches!(err, Error::CoefficientShape { expected: 3, .. }));
    }

    #[test]
    fn records_round_trip() {
        let json = r#"[{"twice_j": 1, "re": [[1, 0], [0, 1]]},
                       {"twice_j": 3, "re": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,1]],
                        "im": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0.5]]}]"#;
        let recs: Vec<PwTermRecord> = serde_json::from_str(json).unwrap();
        let c = PwCoeffs::from_records(&recs).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get(HalfInt::from_twice(3)).unwrap()[(3, 3)], cplx(1.0, 0.5));
        assert_eq!(PwCoeffs::from_records(&c.to_records()).unwrap(), c);
        let bad: Vec<PwTermRecord> = serde_json::from_str(r#"[{"twice_j": 2, "re": [[1]]}]"#).unwrap();
        assert!(PwCoeffs::from_records(&bad).is_err());
    }
}
