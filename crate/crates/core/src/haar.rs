//! Two-polar decomposition `phi = L diag(Q) R^T` on GL+(n, R), the Haar
//! weight, and the radial densities on the deformation invariants.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPolar<T: Real> {
    pub l: DMatrix<T>,
    /// Deformation invariants, descending.
    pub q_big: Vec<T>,
    pub r: DMatrix<T>,
    /// `ln Q`.
    pub q: Vec<T>,
}

impl<T: Real> TwoPolar<T> {
    pub fn reconstruct(&self) -> DMatrix<T> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.q_big));
        &self.l * d * self.r.transpose()
    }
}

fn check_square<T: Real>(phi: &DMatrix<T>) -> Result<usize> {
    if !phi.is_square() || phi.nrows() == 0 {
        return Err(Error::Shape(format!(
            "expected a non-empty square matrix, got {}x{}",
            phi.nrows(),
            phi.ncols()
        )));
    }
    Ok(phi.nrows())
}

fn positive_det<T: Real>(phi: &DMatrix<T>) -> Result<T> {
    check_square(phi)?;
    let det = phi.determinant();
    if !(det > T::zero()) {
        return Err(Error::NonPositiveDeterminant(det.to_f64_lossy()));
    }
    Ok(det)
}

pub fn two_polar<T: Real>(phi: &DMatrix<T>) -> Result<TwoPolar<T>> {
    let n = check_square(phi)?;
    if phi.iter().any(|x| !x.is_finite()) {
        return Err(Error::Singular);
    }
    positive_det(phi)?;
    let svd = phi.clone().svd(true, true);
    let (Some(mut u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::Singular);
    };
    let mut v = v_t.transpose();
    let mut sv: Vec<(T, usize)> = svd.singular_values.iter().copied().zip(0..).collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    if !(sv[n - 1].0 > T::zero()) {
        return Err(Error::Singular);
    }
    let perm: Vec<usize> = sv.iter().map(|p| p.1).collect();
    u = DMatrix::from_fn(n, n, |r, c| u[(r, perm[c])]);
    v = DMatrix::from_fn(n, n, |r, c| v[(r, perm[c])]);
    // det phi > 0 forces det U = det V; flip both to stay in SO(n)
    if u.determinant() < T::zero() {
        u.column_mut(n - 1).neg_mut();
        v.column_mut(n - 1).neg_mut();
    }
    let q_big: Vec<T> = sv.iter().map(|p| p.0).collect();
    let q = q_big.iter().map(|x| x.ln()).collect();
    Ok(TwoPolar {
        l: u,
        q_big,
        r: v,
        q,
    })
}

/// `det(phi)^(-n)`.
pub fn haar_weight<T: Real>(phi: &DMatrix<T>) -> Result<T> {
    let det = positive_det(phi)?;
    Ok(det.powi(-(phi.nrows() as i32)))
}

/// `prod_{i != j} |sinh(q^i - q^j)|`.
pub fn p_lambda<T: Real>(q: &[T]) -> T {
    ordered_pair_product(q, |a, b| (a - b).sinh().abs())
}

/// `prod_{i != j} |(Q^i - Q^j)(Q^i + Q^j)|`.
pub fn p_l<T: Real>(q_big: &[T]) -> T {
    ordered_pair_product(q_big, |a, b| ((a - b) * (a + b)).abs())
}

fn ordered_pair_product<T: Real>(x: &[T], f: impl Fn(T, T) -> T) -> T {
    let mut p = T::one();
    for (i, &a) in x.iter().enumerate() {
        for (j, &b) in x.iter().enumerate() {
            if i != j {
                p *= f(a, b);
            }
        }
    }
    p
}

/// Orthogonality and unit-determinant residual of a rotation matrix.
pub fn rotation_residual<T: Real>(m: &DMatrix<T>) -> T {
    let n = m.nrows();
    let orth = (m.transpose() * m - DMatrix::identity(n, n)).abs().max();
    orth.max((m.determinant() - T::one()).abs())
}
