//! Compressed sparse row storage for the assembled Hamiltonians.

use std::io::Write;

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Square CSR matrix over `f64` or `Complex<f64>`. Column indices within a
/// row are sorted and unique.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: ComplexField<RealField = f64> + Copy> CsrMatrix<T> {
    /// Builds from per-row `(col, value)` lists; duplicates are summed.
    pub fn from_rows(n: usize, rows: Vec<Vec<(usize, T)>>) -> Result<Self> {
        if rows.len() != n {
            return Err(Error::Shape(format!("{} rows for dimension {n}", rows.len())));
        }
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                if c >= n {
                    return Err(Error::Shape(format!("column {c} out of range {n}")));
                }
                if indices.len() > *indptr.last().unwrap() && *indices.last().unwrap() == c {
                    let last = values.len() - 1;
                    values[last] += v;
                } else {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Ok(CsrMatrix {
            n,
            indptr,
            indices,
            values,
        })
    }

    pub fn from_dense(m: &DMatrix<T>) -> Self {
        let n = m.nrows();
        let rows = (0..n)
            .map(|r| {
                (0..n)
                    .filter(|&c| m[(r, c)] != T::zero())
                    .map(|c| (c, m[(r, c)]))
                    .collect()
            })
            .collect();
        Self::from_rows(n, rows).expect("square input")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (c, v) in self.row(r) {
                acc += v * x[c];
            }
            *yr = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::from_element(self.n, self.n, T::zero());
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    /// `max |A_ij - conj(A_ji)| / max |A|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r).conjugate()).modulus());
            }
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum of a hermitian matrix.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.n {
            let mut d = 0.0;
            let mut off = 0.0;
            for (c, v) in self.row(r) {
                if c == r {
                    d = v.real();
                } else {
                    off += v.modulus();
                }
            }
            lo = lo.min(d - off);
            hi = hi.max(d + off);
        }
        (lo, hi)
    }

    /// `A + shift * I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let rows = (0..self.n)
            .map(|r| {
                let mut row: Vec<(usize, T)> = self.row(r).collect();
                row.push((r, T::from_real(shift)));
                row
            })
            .collect();
        Self::from_rows(self.n, rows).expect("same shape")
    }

    /// `P A P^T` with `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let rows = perm
            .iter()
            .map(|&old| self.row(old).map(|(c, v)| (inv[c], v)).collect())
            .collect();
        Self::from_rows(self.n, rows).expect("same shape")
    }
}

impl CsrMatrix<C64> {
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn to_real(&self) -> CsrMatrix<f64> {
        CsrMatrix {
            n: self.n,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v.re).collect(),
        }
    }

    /// Matrix Market coordinate output, 1-based, sorted by row then column.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(w, "{} {} {}", self.n, self.n, self.nnz())?;
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                writeln!(w, "{} {} {:.16e} {:.16e}", r + 1, c + 1, v.re, v.im)?;
            }
        }
        Ok(())
    }
}
