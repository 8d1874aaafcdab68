//! Quantized free top. Each Peter-Weyl block `c^j` solves its own
//! `(2j+1)`-dimensional eigenproblem `M^j c = E c` with
//! `M^j = sum_a (S_a^j)^2 / (2 I_a)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::liegen::{HalfInt, RotRep};
use crate::scalar::{creal, Real, C};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopParams<T> {
    pub inertia: [T; 3],
    pub hbar: T,
}

impl<T: Real> TopParams<T> {
    pub fn new(i1: T, i2: T, i3: T, hbar: T) -> Result<Self> {
        let p = TopParams {
            inertia: [i1, i2, i3],
            hbar,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        for &i in &self.inertia {
            if !(i > T::zero()) {
                return Err(Error::NonPositiveInertia(i.to_f64_lossy()));
            }
        }
        Ok(())
    }
}

/// Distinct levels of one `c^j` problem. Each level is additionally
/// `(2j+1)`-fold degenerate in L^2 through the free column index.
#[derive(Debug, Clone, PartialEq)]
pub struct TopSpectrum<T> {
    pub j: HalfInt,
    /// `(energy, multiplicity)`, energies ascending.
    pub levels: Vec<(T, usize)>,
}

impl<T: Real> TopSpectrum<T> {
    /// Eigenvalues with repetition, ascending.
    pub fn energies(&self) -> Vec<T> {
        self.levels
            .iter()
            .flat_map(|&(e, m)| std::iter::repeat(e).take(m))
            .collect()
    }

    pub fn column_degeneracy(&self) -> usize {
        self.j.dim()
    }
}

pub fn build_top_matrix<T: Real>(rep: &RotRep<T>, params: &TopParams<T>) -> Result<DMatrix<C<T>>> {
    params.validate()?;
    if rep.n() != 3 {
        return Err(Error::UnsupportedDimension(rep.n()));
    }
    let d = rep.dim();
    let mut m = DMatrix::from_element(d, d, creal(T::zero()));
    for (s, &i) in rep.generators().iter().zip(&params.inertia) {
        let w = creal(T::one() / (T::lit(2.0) * i));
        m += (s * s).map(|z| z * w);
    }
    // exact hermiticity
    let mh = m.adjoint();
    Ok((m + mh).map(|z| z * creal(T::lit(0.5))))
}

pub fn top_spectrum<T: Real>(rep: &RotRep<T>, params: &TopParams<T>) -> Result<TopSpectrum<T>> {
    let m = build_top_matrix(rep, params)?;
    let j = rep
        .spin_label()
        .ok_or_else(|| Error::InvalidLabel("top spectrum needs a spin representation".into()))?;
    let mut ev: Vec<T> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(TopSpectrum {
        j,
        levels: group_levels(&ev),
    })
}

/// Groups sorted eigenvalues whose gaps fall below `1e-9 * scale`.
pub(crate) fn group_levels<T: Real>(sorted: &[T]) -> Vec<(T, usize)> {
    let Some((&lo, &hi)) = sorted.first().zip(sorted.last()) else {
        return Vec::new();
    };
    let scale = (hi - lo).max(lo.abs()).max(hi.abs());
    // 1e-9 relative, widened for single precision
    let tol = T::tol(64.0, 1e-9) * scale;
    let mut out: Vec<(T, usize, T)> = Vec::new();
    for &e in sorted {
        match out.last_mut() {
            Some((sum, count, last)) if e - *last <= tol => {
                *sum += e;
                *count += 1;
                *last = e;
            }
            _ => out.push((e, 1, e)),
        }
    }
    out.into_iter()
        .map(|(sum, c, _)| (sum / T::from_usize_lossy(c), c))
        .collect()
}

/// Closed form for `I_1 = I_2 = I`, `I_3 = K`, listed for `m' = -j..j`.
pub fn symmetric_top_levels<T: Real>(j: HalfInt, i: T, k: T, hbar: T) -> Result<Vec<(T, T)>> {
    for v in [i, k] {
        if !(v > T::zero()) {
            return Err(Error::NonPositiveInertia(v.to_f64_lossy()));
        }
    }
    let two = T::lit(2.0);
    let h2 = hbar * hbar;
    let base = h2 * j.casimir::<T>() / (two * i);
    let aniso = T::one() / (two * k) - T::one() / (two * i);
    let jv = j.value::<T>();
    Ok((0..j.dim())
        .map(|t| {
            let m = T::from_usize_lossy(t) - jv;
            (m, base + aniso * h2 * m * m)
        })
        .collect())
}
