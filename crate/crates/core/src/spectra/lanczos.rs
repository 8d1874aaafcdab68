//! Thick-restart Lanczos for the largest eigenvalues of a hermitian
//! operator, with two-pass full re-orthogonalization.

use nalgebra::{ComplexField, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub(crate) trait Scalar: ComplexField<RealField = f64> + Copy {
    fn random(rng: &mut ChaCha8Rng) -> Self;
}

impl Scalar for f64 {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        rng.gen_range(-1.0..1.0)
    }
}

impl Scalar for nalgebra::Complex<f64> {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        nalgebra::Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.conjugate() * *y)
}

pub(crate) fn norm<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

fn scale<T: Scalar>(v: &mut [T], s: f64) {
    for x in v {
        *x = x.scale(s);
    }
}

/// Orthogonalizes `w` against `basis` twice; returns accumulated coefficients.
fn orthogonalize<T: Scalar>(basis: &[Vec<T>], w: &mut [T]) -> Vec<T> {
    let mut h = vec![T::zero(); basis.len()];
    for _ in 0..2 {
        for (hi, v) in h.iter_mut().zip(basis) {
            let c = dot(v, w);
            axpy(-c, v, w);
            *hi += c;
        }
    }
    h
}

pub(crate) struct KrylovSettings {
    pub nev: usize,
    pub ncv: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

pub(crate) struct RitzPairs<T> {
    /// Descending.
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<T>>,
    pub restarts: usize,
}

/// Largest `nev` eigenpairs of the hermitian map `op`. `accept(theta,
/// residual, theta_max)` decides convergence of one Ritz pair.
pub(crate) fn largest<T, Op, Acc>(n: usize, mut op: Op, s: &KrylovSettings, accept: Acc) -> Result<RitzPairs<T>>
where
    T: Scalar,
    Op: FnMut(&[T], &mut [T]),
    Acc: Fn(f64, f64, f64) -> bool,
{
    if s.nev == 0 || s.nev > n {
        return Err(Error::InvalidArgument(format!("cannot compute {} eigenpairs of dimension {n}", s.nev)));
    }
    let ncv = s.ncv.clamp(s.nev + 1, n.max(s.nev + 1)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(ncv + 1);
    let mut v0: Vec<T> = (0..n).map(|_| T::random(&mut rng)).collect();
    let nv = norm(&v0);
    scale(&mut v0, 1.0 / nv);
    basis.push(v0);
    let mut hm = DMatrix::<T>::zeros(ncv + 1, ncv + 1);
    let mut start = 0;
    let mut w = vec![T::zero(); n];

    for restart in 0..=s.max_restarts {
        let mut beta = 0.0;
        for j in start..ncv {
            op(&basis[j], &mut w);
            let h = orthogonalize(&basis, &mut w);
            for (i, hi) in h.into_iter().enumerate() {
                hm[(i, j)] += hi;
            }
            beta = norm(&w);
            if j + 1 == n {
                break;
            }
            let scale_ref = hm[(j, j)].modulus().max(1e-300);
            if beta <= 1e-13 * scale_ref {
                // invariant subspace: continue with a fresh direction
                let mut r: Vec<T> = (0..n).map(|_| T::random(&mut rng)).collect();
                orthogonalize(&basis, &mut r);
                let nr = norm(&r);
                scale(&mut r, 1.0 / nr);
                hm[(j + 1, j)] = T::zero();
                basis.push(r);
                beta = 0.0;
            } else {
                hm[(j + 1, j)] = T::from_real(beta);
                let mut next = w.clone();
                scale(&mut next, 1.0 / beta);
                basis.push(next);
            }
        }
        let m = ncv;
        let hsq = hm.view((0, 0), (m, m)).into_owned();
        let herm = (&hsq + hsq.adjoint()).map(|z| z.scale(0.5));
        let eig = herm.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let theta_max = eig.eigenvalues[order[0]].abs();
        let resid = |i: usize| (beta * eig.eigenvectors[(m - 1, order[i])].modulus()).abs();
        let converged = (0..s.nev).all(|i| accept(eig.eigenvalues[order[i]], resid(i), theta_max));
        let keep = if converged || restart == s.max_restarts || m == n {
            s.nev
        } else {
            ((s.nev + m) / 2).max(s.nev).min(m - 1)
        };
        let ritz: Vec<Vec<T>> = (0..keep)
            .map(|i| {
                let y = eig.eigenvectors.column(order[i]);
                let mut u = vec![T::zero(); n];
                for (c, v) in basis.iter().take(m).enumerate() {
                    axpy(y[c], v, &mut u);
                }
                u
            })
            .collect();
        if converged || m == n {
            return Ok(RitzPairs {
                values: (0..s.nev).map(|i| eig.eigenvalues[order[i]]).collect(),
                vectors: ritz,
                restarts: restart,
            });
        }
        if restart == s.max_restarts {
            break;
        }
        let residual_vec = basis.pop().expect("residual vector");
        basis.clear();
        basis.extend(ritz);
        basis.push(residual_vec);
        hm.fill(T::zero());
        for i in 0..keep {
            hm[(i, i)] = T::from_real(eig.eigenvalues[order[i]]);
            hm[(keep, i)] = eig.eigenvectors[(m - 1, order[i])].scale(beta);
        }
        start = keep;
    }
    Err(Error::NoConvergence(format!(
        "{} eigenpairs not converged after {} restarts",
        s.nev, s.max_restarts
    )))
}

/// Repeats [`largest`] with the pairs found so far projected out, from a
/// fresh start vector, until a pass adds nothing to the wanted set. A single
/// Krylov sequence sees only one direction of an exactly degenerate level.
pub(crate) fn largest_complete<T, Op, Acc>(n: usize, mut op: Op, s: &KrylovSettings, accept: Acc) -> Result<RitzPairs<T>>
where
    T: Scalar,
    Op: FnMut(&[T], &mut [T]),
    Acc: Fn(f64, f64, f64) -> bool,
{
    let mut kept: Vec<(f64, Vec<T>)> = Vec::new();
    let mut restarts = 0;
    let mut proj = vec![T::zero(); n];
    for pass in 0..=s.nev {
        let free = n - kept.len();
        if free == 0 {
            break;
        }
        let locked: Vec<Vec<T>> = kept.iter().map(|p| p.1.clone()).collect();
        let settings = KrylovSettings {
            nev: s.nev.min(free),
            ncv: s.ncv.min(free),
            max_restarts: s.max_restarts,
            seed: s.seed.wrapping_add(pass as u64),
        };
        let r = largest(
            n,
            |x: &[T], y: &mut [T]| {
                proj.copy_from_slice(x);
                orthogonalize(&locked, &mut proj);
                op(&proj, y);
                orthogonalize(&locked, y);
            },
            &settings,
            &accept,
        )?;
        restarts += r.restarts;
        let improved = kept.len() < s.nev || {
            let floor = kept[s.nev - 1].0;
            r.values.iter().any(|&th| th > floor + 1e-9 * floor.abs())
        };
        for (th, mut v) in r.values.into_iter().zip(r.vectors) {
            orthogonalize(&locked, &mut v);
            let nv = norm(&v);
            scale(&mut v, 1.0 / nv);
            kept.push((th, v));
        }
        kept.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        kept.truncate(s.nev);
        if !improved {
            break;
        }
    }
    Ok(RitzPairs {
        values: kept.iter().map(|p| p.0).collect(),
        vectors: kept.into_iter().map(|p| p.1).collect(),
        restarts,
    })
}
