//! Irreducible representations of the rotation symmetry.
//!
//! For `n = 3` the representations are labelled by a non-negative half
//! integer `j` and built in the standard ladder basis: `S3` is diagonal with
//! entries `hbar * m`, `m = j, j-1, ..., -j`. For `n = 2` the irreducible
//! representations are one-dimensional with `S12 = hbar * m`. Other
//! dimensions are accepted only as user-supplied generator sets.
//!
//! Pair-indexed generators follow `S_ab = eps_abc S_c` for `n = 3` and are
//! antisymmetric in `(a, b)`. Axis indices are zero-based throughout the API.

use std::fmt;
use std::str::FromStr;

use nalgebra::{ComplexField, DMatrix, Matrix2, SymmetricEigen, Vector3};

use crate::error::{Error, Result};
use crate::scalar::{cplx, creal, Real, C};

/// A non-negative half integer stored exactly as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt {
    twice: u32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub const fn from_twice(twice: u32) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(j: u32) -> Self {
        HalfInt { twice: 2 * j }
    }

    pub const fn twice(self) -> u32 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// Representation dimension `2j + 1`.
    pub const fn dim(self) -> usize {
        self.twice as usize + 1
    }

    pub fn value<T: Real>(self) -> T {
        T::lit(self.twice as f64) / T::lit(2.0)
    }

    /// `j (j + 1)`.
    pub fn casimir<T: Real>(self) -> T {
        let tw = self.twice as f64;
        T::lit(tw * (tw + 2.0) / 4.0)
    }

    /// All half integers `0, 1/2, ..., self`.
    pub fn up_to(self) -> impl Iterator<Item = HalfInt> {
        (0..=self.twice).map(HalfInt::from_twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"2"`, `"3/2"` and `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidLabel(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            return match den {
                1 if num >= 0 => Ok(HalfInt::from_twice(2 * num as u32)),
                2 if num >= 0 => Ok(HalfInt::from_twice(num as u32)),
                _ => Err(bad()),
            };
        }
        if let Ok(j) = s.parse::<i64>() {
            return if j >= 0 {
                Ok(HalfInt::from_int(j as u32))
            } else {
                Err(bad())
            };
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let tw = 2.0 * x;
        if x < 0.0 || (tw - tw.round()).abs() > 1e-12 {
            return Err(bad());
        }
        Ok(HalfInt::from_twice(tw.round() as u32))
    }
}

/// Whether a label belongs to the integer or the half-odd family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halfness {
    Integer,
    HalfOdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepLabel {
    /// `n = 3`: angular momentum `j`.
    Spin(HalfInt),
    /// `n = 2`: integer weight `m`.
    Weight(i64),
    /// User-supplied generators.
    Custom(Halfness),
}

impl RepLabel {
    pub fn halfness(self) -> Halfness {
        match self {
            RepLabel::Spin(j) if !j.is_integer() => Halfness::HalfOdd,
            RepLabel::Custom(h) => h,
            _ => Halfness::Integer,
        }
    }
}

impl fmt::Display for RepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepLabel::Spin(j) => write!(f, "j={j}"),
            RepLabel::Weight(m) => write!(f, "m={m}"),
            RepLabel::Custom(h) => write!(f, "custom({h:?})"),
        }
    }
}

/// Input label for [`build_rot_rep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Half(HalfInt),
    Int(i64),
}

/// An irreducible unitary representation with hermitian generators.
#[derive(Debug, Clone, PartialEq)]
pub struct RotRep<T: Real> {
    n: usize,
    label: RepLabel,
    hbar: T,
    dim: usize,
    /// `S_1..S_3` for `n = 3`; empty otherwise.
    axial: Vec<DMatrix<C<T>>>,
    /// `S_ab` for `a < b`, lexicographic.
    pairs: Vec<DMatrix<C<T>>>,
}

fn pair_slot(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    // rows 0..a contribute (n-1) + (n-2) + ... + (n-a)
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Builds the irreducible representation of the rotation group in `n`
/// dimensions with the given label.
pub fn build_rot_rep<T: Real>(n: usize, label: Label, hbar: T) -> Result<RotRep<T>> {
    match (n, label) {
        (3, Label::Half(j)) => Ok(RotRep::spin(j, hbar)),
        (3, Label::Int(j)) if j >= 0 => Ok(RotRep::spin(HalfInt::from_int(j as u32), hbar)),
        (3, Label::Int(j)) => Err(Error::InvalidLabel(format!("negative label {j}"))),
        (2, Label::Int(m)) => Ok(RotRep::planar(m, hbar)),
        (2, Label::Half(j)) if j.is_integer() => Ok(RotRep::planar(i64::from(j.twice() / 2), hbar)),
        (2, Label::Half(j)) => Err(Error::InvalidLabel(format!(
            "SO(2) weights are integers, got {j}"
        ))),
        (n, _) => Err(Error::UnsupportedDimension(n)),
    }
}

impl<T: Real> RotRep<T> {
    /// Spin-`j` representation of SU(2) in the ladder basis.
    pub fn spin(j: HalfInt, hbar: T) -> Self {
        let dim = j.dim();
        let tj = j.twice() as i64;
        let zero = C::<T>::new(T::zero(), T::zero());
        let mut s3 = DMatrix::from_element(dim, dim, zero);
        let mut s_plus = DMatrix::from_element(dim, dim, zero);
        for r in 0..dim {
            // basis vector r carries m = j - r
            let tm = tj - 2 * r as i64;
            s3[(r, r)] = creal(hbar * T::lit(tm as f64) / T::lit(2.0));
            if r > 0 {
                // S+ |m> = hbar sqrt((j - m)(j + m + 1)) |m + 1>
                let num = ((tj - tm) * (tj + tm + 2)) as f64 / 4.0;
                s_plus[(r - 1, r)] = creal(hbar * T::lit(num).sqrt());
            }
        }
        let s_minus = s_plus.adjoint();
        let half = T::lit(0.5);
        let s1 = (&s_plus + &s_minus).map(|z| z * half);
        // (S+ - S-) / (2i) = -i/2 (S+ - S-)
        let s2 = (&s_plus - &s_minus).map(|z| z * cplx(T::zero(), -half));
        // S_12 = S_3, S_13 = -S_2, S_23 = S_1
        let pairs = vec![s3.clone(), s2.map(|z| -z), s1.clone()];
        RotRep {
            n: 3,
            label: RepLabel::Spin(j),
            hbar,
            dim,
            axial: vec![s1, s2, s3],
            pairs,
        }
    }

    /// One-dimensional SO(2) representation with weight `m`.
    pub fn planar(m: i64, hbar: T) -> Self {
        let g = DMatrix::from_element(1, 1, creal(hbar * T::lit(m as f64)));
        RotRep {
            n: 2,
            label: RepLabel::Weight(m),
            hbar,
            dim: 1,
            axial: Vec::new(),
            pairs: vec![g],
        }
    }

    /// Accepts user-supplied generators `S_ab` (zero-based `a < b`), one per
    /// unordered pair. Each must be square, of a common size and hermitian.
    pub fn from_generators(
        n: usize,
        generators: Vec<((usize, usize), DMatrix<C<T>>)>,
        hbar: T,
        halfness: Halfness,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension(n));
        }
        let npairs = n * (n - 1) / 2;
        let mut slots: Vec<Option<DMatrix<C<T>>>> = vec![None; npairs];
        let mut dim = None;
        for ((a, b), g) in generators {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidGenerators(format!("bad pair ({a}, {b})")));
            }
            let (a, b, g) = if a < b { (a, b, g) } else { (b, a, g.map(|z| -z)) };
            if !g.is_square() {
                return Err(Error::InvalidGenerators(format!("S_{a}{b} is not square")));
            }
            match dim {
                None => dim = Some(g.nrows()),
                Some(d) if d != g.nrows() => {
                    return Err(Error::InvalidGenerators("inconsistent sizes".into()))
                }
                _ => {}
            }
            let scale = g.iter().map(|z| z.modulus()).fold(T::one(), |m, x| m.max(x));
            if hermiticity_residual(&g) > T::tol(64.0, 1e-12) * scale {
                return Err(Error::InvalidGenerators(format!("S_{a}{b} is not hermitian")));
            }
            let slot = pair_slot(n, a, b);
            if slots[slot].is_some() {
                return Err(Error::InvalidGenerators(format!("duplicate pair ({a}, {b})")));
            }
            slots[slot] = Some(g);
        }
        let dim = dim.ok_or_else(|| Error::InvalidGenerators("no generators".into()))?;
        let pairs = slots
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.ok_or_else(|| Error::InvalidGenerators(format!("missing pair slot {i}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(RotRep {
            n,
            label: RepLabel::Custom(halfness),
            hbar,
            dim,
            axial: Vec::new(),
            pairs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> RepLabel {
        self.label
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The angular-momentum label for `n = 3` representations.
    pub fn spin_label(&self) -> Option<HalfInt> {
        match self.label {
            RepLabel::Spin(j) => Some(j),
            _ => None,
        }
    }

    /// `S_a` (zero-based), available for `n = 3`.
    pub fn generator(&self, a: usize) -> Option<&DMatrix<C<T>>> {
        self.axial.get(a)
    }

    pub fn generators(&self) -> &[DMatrix<C<T>>] {
        &self.axial
    }

    /// Pair-indexed generator `S_ab = -S_ba`.
    pub fn pair(&self, a: usize, b: usize) -> Result<DMatrix<C<T>>> {
        if a == b {
            return Err(Error::SameAxis(a));
        }
        if a >= self.n || b >= self.n {
            return Err(Error::InvalidArgument(format!(
                "axis pair ({a}, {b}) out of range for n = {}",
                self.n
            )));
        }
        if a < b {
            Ok(self.pairs[pair_slot(self.n, a, b)].clone())
        } else {
            Ok(self.pairs[pair_slot(self.n, b, a)].map(|z| -z))
        }
    }

    /// `-1/2 sum_{a != b} S_ab S_ba`, which equals `hbar^2 C(2) Id`.
    pub fn casimir_matrix(&self) -> DMatrix<C<T>> {
        let zero = creal(T::zero());
        let mut acc = DMatrix::from_element(self.dim, self.dim, zero);
        for g in &self.pairs {
            acc += g * g;
        }
        acc
    }

    /// Residuals of the defining identities, in max-norm.
    pub fn residuals(&self) -> RepResiduals<T> {
        let hermiticity = self
            .pairs
            .iter()
            .chain(self.axial.iter())
            .map(hermiticity_residual)
            .fold(T::zero(), |m, x| m.max(x));
        let mut commutator = T::zero();
        if self.axial.len() == 3 {
            let i_hbar = cplx(T::zero(), self.hbar);
            for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                let (sa, sb, sc) = (&self.axial[a], &self.axial[b], &self.axial[c]);
                let lhs = sa * sb - sb * sa;
                let rhs = sc.map(|z| z * i_hbar);
                commutator = commutator.max(max_abs(&(lhs - rhs)));
            }
        }
        let expected = self.hbar * self.hbar * casimir_eigenvalue(self);
        let cas = self.casimir_matrix();
        let mut casimir = T::zero();
        for r in 0..self.dim {
            for c in 0..self.dim {
                let target = if r == c { expected } else { T::zero() };
                casimir = casimir.max((cas[(r, c)] - creal(target)).modulus());
            }
        }
        RepResiduals {
            hermiticity,
            commutator,
            casimir,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepResiduals<T> {
    pub hermiticity: T,
    pub commutator: T,
    pub casimir: T,
}

/// The Casimir value `C(2)` such that `-1/2 sum S_ab S_ba = hbar^2 C(2) Id`:
/// `j (j + 1)` for `n = 3`, `m^2` for `n = 2`, read off the matrix otherwise.
pub fn casimir_eigenvalue<T: Real>(rep: &RotRep<T>) -> T {
    match rep.label {
        RepLabel::Spin(j) => j.casimir(),
        RepLabel::Weight(m) => T::lit((m * m) as f64),
        RepLabel::Custom(_) => {
            let cas = rep.casimir_matrix();
            let tr = (0..rep.dim).fold(T::zero(), |acc, i| acc + cas[(i, i)].re);
            tr / (T::from_usize_lossy(rep.dim) * rep.hbar * rep.hbar)
        }
    }
}

fn two_pi<T: Real>() -> T {
    T::two_pi()
}

/// `D^j(u(k)) = exp(-(i / hbar) k^a S_a)`, so that the spin-1/2 case is the
/// defining matrix `exp(-(i/2) k . sigma)`.
pub fn wigner_d<T: Real>(rep: &RotRep<T>, k: &Vector3<T>) -> Result<DMatrix<C<T>>> {
    if rep.n != 3 || rep.axial.len() != 3 {
        return Err(Error::UnsupportedDimension(rep.n));
    }
    let len = k.norm();
    if len > two_pi::<T>() * (T::one() + T::tol(16.0, 0.0)) {
        return Err(Error::RotationTooLarge(len.to_f64_lossy()));
    }
    let zero = creal(T::zero());
    let mut g = DMatrix::from_element(rep.dim, rep.dim, zero);
    for a in 0..3 {
        let w = k[a] / rep.hbar;
        g += rep.axial[a].map(|z| z * creal(w));
    }
    Ok(exp_minus_i_hermitian(g))
}

/// `exp(-i G)` for hermitian `G`, via its eigendecomposition.
pub(crate) fn exp_minus_i_hermitian<T: Real>(g: DMatrix<C<T>>) -> DMatrix<C<T>> {
    let dim = g.nrows();
    let g = symmetrize(g);
    let eig = SymmetricEigen::new(g);
    let phases: Vec<C<T>> = eig
        .eigenvalues
        .iter()
        .map(|&l| cplx(l.cos(), -l.sin()))
        .collect();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for c in 0..dim {
        for r in 0..dim {
            scaled[(r, c)] *= phases[c];
        }
    }
    scaled * v.adjoint()
}

fn symmetrize<T: Real>(m: DMatrix<C<T>>) -> DMatrix<C<T>> {
    let half = creal(T::lit(0.5));
    (&m + m.adjoint()).map(|z| z * half)
}

pub(crate) fn hermiticity_residual<T: Real>(m: &DMatrix<C<T>>) -> T {
    max_abs(&(m - m.adjoint()))
}

pub(crate) fn max_abs<T: Real>(m: &DMatrix<C<T>>) -> T {
    m.iter().map(|z| z.modulus()).fold(T::zero(), |a, b| a.max(b))
}

/// Unit quaternion view of SU(2) used to compose rotation vectors.
pub mod su2 {
    use super::*;

    /// `u(k) = exp(-(i/2) k . sigma)` in closed form.
    pub fn matrix<T: Real>(k: &Vector3<T>) -> Matrix2<C<T>> {
        let theta = k.norm();
        let half = theta / T::lit(2.0);
        let (s, c) = (half.sin(), half.cos());
        let n = if theta > T::zero() { k / theta } else { Vector3::zeros() };
        Matrix2::new(
            cplx(c, -s * n[2]),
            cplx(-s * n[1], -s * n[0]),
            cplx(s * n[1], -s * n[0]),
            cplx(c, s * n[2]),
        )
    }

    /// Inverse of [`matrix`] on SU(2), returning `|k| <= 2 pi`.
    pub fn log<T: Real>(u: &Matrix2<C<T>>) -> Vector3<T> {
        // u = cos(t/2) I - i sin(t/2) n.sigma
        let c = ((u[(0, 0)].re + u[(1, 1)].re) / T::lit(2.0)).clamp(-T::one(), T::one());
        let sn = Vector3::new(
            -(u[(0, 1)].im + u[(1, 0)].im) / T::lit(2.0),
            (u[(1, 0)].re - u[(0, 1)].re) / T::lit(2.0),
            (u[(1, 1)].im - u[(0, 0)].im) / T::lit(2.0),
        );
        let s = sn.norm();
        if s == T::zero() {
            return if c > T::zero() {
                Vector3::zeros()
            } else {
                Vector3::new(T::zero(), T::zero(), T::two_pi())
            };
        }
        let theta = T::lit(2.0) * s.atan2(c);
        sn * (theta / s)
    }

    /// Rotation vector of `u(k1) u(k2)`.
    pub fn compose<T: Real>(k1: &Vector3<T>, k2: &Vector3<T>) -> Vector3<T> {
        log(&(matrix(k1) * matrix(k2)))
    }

    /// Rotation vector of `-u(k)`.
    pub fn antipode<T: Real>(k: &Vector3<T>) -> Vector3<T> {
        let theta = k.norm();
        if theta == T::zero() {
            return Vector3::new(T::zero(), T::zero(), T::two_pi());
        }
        k * ((theta - T::two_pi()) / theta)
    }
}
