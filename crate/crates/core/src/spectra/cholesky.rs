//! Up-looking sparse Cholesky `P (A - σ I) P^T = L L^H` for hermitian
//! positive definite matrices, driven by the elimination tree.

use nalgebra::ComplexField;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub struct SparseCholesky<T> {
    n: usize,
    perm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<T>,
}

struct Reach {
    mark: Vec<usize>,
    stack: Vec<usize>,
    buf: Vec<usize>,
}

impl Reach {
    fn new(n: usize) -> Self {
        Reach {
            mark: vec![usize::MAX; n],
            stack: vec![0; n],
            buf: vec![0; n],
        }
    }

    /// Pattern of row `k` of `L`, in topological order.
    fn row_pattern<T>(&mut self, k: usize, col: &[(usize, T)], parent: &[usize]) -> &[usize] {
        let n = self.stack.len();
        let mut top = n;
        self.mark[k] = k;
        for &(i0, _) in col {
            if i0 >= k {
                continue;
            }
            let mut len = 0;
            let mut i = i0;
            while self.mark[i] != k {
                self.buf[len] = i;
                len += 1;
                self.mark[i] = k;
                i = parent[i];
            }
            while len > 0 {
                len -= 1;
                top -= 1;
                self.stack[top] = self.buf[len];
            }
        }
        &self.stack[top..]
    }
}

impl<T: ComplexField<RealField = f64> + Copy> SparseCholesky<T> {
    /// Factors `A - shift I` under the ordering `perm[new] = old`.
    pub fn factor(a: &CsrMatrix<T>, shift: f64, perm: &[usize]) -> Result<Self> {
        let n = a.dim();
        if perm.len() != n {
            return Err(Error::Shape(format!("ordering has {} entries for dimension {n}", perm.len())));
        }
        let pa = a.permuted(perm);
        // upper triangle by columns: A(i, k) = conj(A(k, i)), i <= k
        let cols: Vec<Vec<(usize, T)>> = (0..n)
            .map(|k| {
                pa.row(k)
                    .filter(|&(i, _)| i <= k)
                    .map(|(i, v)| if i == k { (i, v - T::from_real(shift)) } else { (i, v.conjugate()) })
                    .collect()
            })
            .collect();

        let parent = etree(&cols);
        let mut reach = Reach::new(n);
        let mut counts = vec![1usize; n];
        for (k, col) in cols.iter().enumerate() {
            for &i in reach.row_pattern(k, col, &parent) {
                counts[i] += 1;
            }
        }
        let mut lp = vec![0; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + counts[k];
        }
        let nnz = lp[n];
        let mut li = vec![0; nnz];
        let mut lx = vec![T::zero(); nnz];
        let mut next: Vec<usize> = lp[..n].to_vec();
        let mut x = vec![T::zero(); n];

        for (k, col) in cols.iter().enumerate() {
            for &(i, v) in col {
                x[i] = v;
            }
            let mut d = x[k].real();
            x[k] = T::zero();
            let pattern = reach.row_pattern(k, col, &parent);
            for &i in pattern {
                let lki = x[i] / lx[lp[i]];
                x[i] = T::zero();
                for p in lp[i] + 1..next[i] {
                    let r = li[p];
                    x[r] -= lx[p] * lki;
                }
                d -= lki.modulus_squared();
                let p = next[i];
                next[i] += 1;
                li[p] = k;
                lx[p] = lki.conjugate();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: k, value: d });
            }
            let p = next[k];
            next[k] += 1;
            li[p] = k;
            lx[p] = T::from_real(d.sqrt());
        }
        Ok(SparseCholesky {
            n,
            perm: perm.to_vec(),
            lp,
            li,
            lx,
        })
    }

    pub fn nnz(&self) -> usize {
        self.lx.len()
    }

    /// Solves `(A - shift I) x = b`; `work` must have length `n`.
    pub fn solve(&self, b: &[T], x: &mut [T], work: &mut [T]) {
        let z = work;
        for (new, &old) in self.perm.iter().enumerate() {
            z[new] = b[old];
        }
        for j in 0..self.n {
            let start = self.lp[j];
            z[j] /= self.lx[start];
            let zj = z[j];
            for p in start + 1..self.lp[j + 1] {
                z[self.li[p]] -= self.lx[p] * zj;
            }
        }
        for j in (0..self.n).rev() {
            let start = self.lp[j];
            let mut acc = z[j];
            for p in start + 1..self.lp[j + 1] {
                acc -= self.lx[p].conjugate() * z[self.li[p]];
            }
            z[j] = acc / self.lx[start];
        }
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = z[new];
        }
    }
}

fn etree<T>(cols: &[Vec<(usize, T)>]) -> Vec<usize> {
    let n = cols.len();
    let mut parent = vec![usize::MAX; n];
    let mut ancestor = vec![usize::MAX; n];
    for (k, col) in cols.iter().enumerate() {
        for &(i0, _) in col {
            let mut i = i0;
            while i != usize::MAX && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == usize::MAX {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }
    parent
}
