//! Classical affine bodies: velocities, the four kinetic energies, analytic
//! geodesics and fixed-step RK4 trajectories with conservation monitors.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::reduced::{AffineModel, ModelKind};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct AffineState<T: Real> {
    pub phi: DMatrix<T>,
    pub phidot: DMatrix<T>,
}

impl<T: Real> AffineState<T> {
    pub fn new(phi: DMatrix<T>, phidot: DMatrix<T>) -> Result<Self> {
        if !phi.is_square() || phi.shape() != phidot.shape() || phi.nrows() == 0 {
            return Err(Error::Shape(format!(
                "phi {:?} and phidot {:?} must be equal square shapes",
                phi.shape(),
                phidot.shape()
            )));
        }
        let det = phi.determinant();
        if !(det > T::zero()) {
            return Err(Error::NonPositiveDeterminant(det.to_f64_lossy()));
        }
        Ok(AffineState { phi, phidot })
    }

    pub fn n(&self) -> usize {
        self.phi.nrows()
    }
}

/// `(Omega, Omega_hat) = (phidot phi^-1, phi^-1 phidot)`.
pub fn velocities<T: Real>(state: &AffineState<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let inv = state.phi.clone().try_inverse().ok_or(Error::Singular)?;
    Ok((&state.phidot * &inv, inv * &state.phidot))
}

fn affine_part<T: Real>(w: &DMatrix<T>, a: T, b: T) -> T {
    let half = T::lit(0.5);
    let tr = w.trace();
    half * a * (w * w).trace() + half * b * tr * tr
}

pub fn kinetic_energy<T: Real>(model: &AffineModel<T>, state: &AffineState<T>) -> Result<T> {
    let half = T::lit(0.5);
    match model.kind {
        ModelKind::DAlembert => Ok(half * model.i * state.phidot.norm_squared()),
        ModelKind::AffAff => {
            let (om, _) = velocities(state)?;
            Ok(affine_part(&om, model.a, model.b))
        }
        ModelKind::MetAff => {
            let (om, _) = velocities(state)?;
            Ok(half * model.i * om.norm_squared() + affine_part(&om, model.a, model.b))
        }
        ModelKind::AffMet => {
            let (_, oh) = velocities(state)?;
            Ok(half * model.i * oh.norm_squared() + affine_part(&oh, model.a, model.b))
        }
    }
}

/// Potential on the mean logarithmic invariant `q = ln(det phi) / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DilatationPotential<T> {
    None,
    Harmonic { kappa: T },
}

impl<T: Real> DilatationPotential<T> {
    pub fn value(&self, phi: &DMatrix<T>) -> T {
        match *self {
            DilatationPotential::None => T::zero(),
            DilatationPotential::Harmonic { kappa } => {
                let q = phi.determinant().ln() / T::from_usize_lossy(phi.nrows());
                T::lit(0.5) * kappa * q * q
            }
        }
    }

    /// `dV/dphi = kappa q (1/n) phi^{-T}`.
    pub fn gradient(&self, phi: &DMatrix<T>) -> Result<DMatrix<T>> {
        let n = phi.nrows();
        match *self {
            DilatationPotential::None => Ok(DMatrix::zeros(n, n)),
            DilatationPotential::Harmonic { kappa } => {
                let nn = T::from_usize_lossy(n);
                let q = phi.determinant().ln() / nn;
                let inv = phi.clone().try_inverse().ok_or(Error::Singular)?;
                Ok(inv.transpose() * (kappa * q / nn))
            }
        }
    }
}

/// Analytic geodesics: `phi0 exp(t Omega_hat0)` (affine-affine) or the
/// straight line (d'Alembert).
pub fn geodesic<T: Real>(model: &AffineModel<T>, state0: &AffineState<T>, t: T) -> Result<AffineState<T>> {
    match model.kind {
        ModelKind::DAlembert => Ok(AffineState {
            phi: &state0.phi + &state0.phidot * t,
            phidot: state0.phidot.clone(),
        }),
        ModelKind::AffAff => {
            let (_, oh) = velocities(state0)?;
            let phi = &state0.phi * (&oh * t).exp();
            let phidot = &phi * &oh;
            Ok(AffineState { phi, phidot })
        }
        kind => Err(Error::InvalidModel(format!(
            "no closed-form geodesic for {kind}; integrate numerically"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions<T> {
    pub dt: T,
    pub t_end: T,
    /// Record every `every`-th step (and the last one).
    pub every: usize,
    /// Abort once the relative energy drift exceeds this bound.
    pub max_drift: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T: Real> {
    pub t: T,
    pub state: AffineState<T>,
    pub energy: T,
    pub energy_drift: T,
    /// `|Omega_hat(t) - Omega_hat(0)|` for the geodetic affine-affine model.
    pub omega_hat_deviation: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    pub samples: Vec<Sample<T>>,
    pub max_energy_drift: T,
    pub max_omega_hat_deviation: Option<T>,
}

struct Dynamics<'a, T: Real> {
    model: &'a AffineModel<T>,
    pot: &'a DilatationPotential<T>,
}

impl<T: Real> Dynamics<'_, T> {
    fn energy(&self, s: &AffineState<T>) -> Result<T> {
        Ok(kinetic_energy(self.model, s)? + self.pot.value(&s.phi))
    }

    fn lagrangian(&self, phi: &DMatrix<T>, v: &DMatrix<T>) -> Result<T> {
        let s = AffineState {
            phi: phi.clone(),
            phidot: v.clone(),
        };
        Ok(kinetic_energy(self.model, &s)? - self.pot.value(phi))
    }

    fn acceleration(&self, phi: &DMatrix<T>, v: &DMatrix<T>) -> Result<DMatrix<T>> {
        let geodetic = matches!(self.pot, DilatationPotential::None);
        match self.model.kind {
            ModelKind::AffAff if geodetic => {
                let inv = phi.clone().try_inverse().ok_or(Error::Singular)?;
                Ok(v * inv * v)
            }
            ModelKind::DAlembert => Ok(self.pot.gradient(phi)? * (-T::one() / self.model.i)),
            _ => self.euler_lagrange(phi, v),
        }
    }

    /// Velocity Hessian of the quadratic kinetic energy by polarization.
    fn mass_matrix(&self, phi: &DMatrix<T>) -> Result<DMatrix<T>> {
        let n = phi.nrows();
        let d = n * n;
        let unit = |i: usize| DMatrix::from_fn(n, n, |r, c| if r * n + c == i { T::one() } else { T::zero() });
        let zero_pot = Dynamics {
            model: self.model,
            pot: &DilatationPotential::None,
        };
        let t_of = |v: &DMatrix<T>| zero_pot.lagrangian(phi, v);
        let diag: Vec<T> = (0..d).map(|i| t_of(&unit(i))).collect::<Result<_>>()?;
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = T::lit(2.0) * diag[i];
            for j in i + 1..d {
                let mij = t_of(&(unit(i) + unit(j)))? - diag[i] - diag[j];
                m[(i, j)] = mij;
                m[(j, i)] = mij;
            }
        }
        Ok(m)
    }

    /// Solves `M phi'' = dL/dphi - (d/dphi (M v)) v` with central differences.
    fn euler_lagrange(&self, phi: &DMatrix<T>, v: &DMatrix<T>) -> Result<DMatrix<T>> {
        let n = phi.nrows();
        let d = n * n;
        let step = T::default_epsilon().cbrt();
        let flat = |m: &DMatrix<T>| -> Vec<T> { (0..d).map(|k| m[(k / n, k % n)]).collect() };
        let vf = flat(v);

        let mut rhs = vec![T::zero(); d];
        for (k, r) in rhs.iter_mut().enumerate() {
            let h = step * phi[(k / n, k % n)].abs().max(T::one());
            let mut p = phi.clone();
            p[(k / n, k % n)] += h;
            let up = self.lagrangian(&p, v)?;
            p[(k / n, k % n)] -= h + h;
            let down = self.lagrangian(&p, v)?;
            *r = (up - down) / (h + h);
        }

        let vnorm = v.norm();
        if vnorm > T::zero() {
            let h = step * phi.norm().max(T::one()) / vnorm;
            let vvec = nalgebra::DVector::from_column_slice(&vf);
            let mp = self.mass_matrix(&(phi + v * h))? * &vvec;
            let mm = self.mass_matrix(&(phi - v * h))? * &vvec;
            for k in 0..d {
                rhs[k] -= (mp[k] - mm[k]) / (h + h);
            }
        }
        let m = self.mass_matrix(phi)?;
        let acc = m
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(&rhs))
            .ok_or_else(|| Error::Unstable("kinetic metric is singular at this configuration".into()))?;
        Ok(DMatrix::from_fn(n, n, |r, c| acc[r * n + c]))
    }
}

fn rk4_step<T: Real>(dyn_: &Dynamics<T>, s: &AffineState<T>, h: T) -> Result<AffineState<T>> {
    let half = T::lit(0.5);
    let (x0, v0) = (&s.phi, &s.phidot);
    let a1 = dyn_.acceleration(x0, v0)?;
    let (x2, v2) = (x0 + v0 * (half * h), v0 + &a1 * (half * h));
    let a2 = dyn_.acceleration(&x2, &v2)?;
    let (x3, v3) = (x0 + &v2 * (half * h), v0 + &a2 * (half * h));
    let a3 = dyn_.acceleration(&x3, &v3)?;
    let (x4, v4) = (x0 + &v3 * h, v0 + &a3 * h);
    let a4 = dyn_.acceleration(&x4, &v4)?;
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    Ok(AffineState {
        phi: x0 + (v0 + &v2 * two + &v3 * two + &v4) * sixth,
        phidot: v0 + (a1 + a2 * two + a3 * two + a4) * sixth,
    })
}

pub fn integrate<T: Real>(
    model: &AffineModel<T>,
    pot: &DilatationPotential<T>,
    state0: &AffineState<T>,
    opts: &IntegrateOptions<T>,
) -> Result<Trajectory<T>> {
    if !(opts.dt > T::zero()) || !(opts.t_end >= T::zero()) {
        return Err(Error::InvalidArgument("dt must be positive and t_end non-negative".into()));
    }
    if model.kind == ModelKind::DAlembert && !(model.i > T::zero()) {
        return Err(Error::InvalidModel("d'Alembert model needs I > 0".into()));
    }
    let every = opts.every.max(1);
    let ratio = (opts.t_end / opts.dt).to_f64_lossy();
    let steps = (ratio - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { T::zero() } else { opts.t_end / T::from_usize_lossy(steps) };

    let dyn_ = Dynamics { model, pot };
    let e0 = dyn_.energy(state0)?;
    let track_oh = model.kind == ModelKind::AffAff && matches!(pot, DilatationPotential::None);
    let oh0 = velocities(state0)?.1;
    let drift_of = |e: T| {
        let d = (e - e0).abs();
        if e0.abs() > T::tol(0.0, 1e-12) {
            d / e0.abs()
        } else {
            d
        }
    };
    let sample = |t: T, s: &AffineState<T>| -> Result<Sample<T>> {
        let e = dyn_.energy(s)?;
        let dev = if track_oh { Some((velocities(s)?.1 - &oh0).norm()) } else { None };
        Ok(Sample {
            t,
            state: s.clone(),
            energy: e,
            energy_drift: drift_of(e),
            omega_hat_deviation: dev,
        })
    };

    let mut samples = vec![sample(T::zero(), state0)?];
    let mut max_drift = T::zero();
    let mut max_dev = track_oh.then_some(T::zero());
    let mut s = state0.clone();
    for k in 1..=steps {
        s = rk4_step(&dyn_, &s, h)?;
        let t = h * T::from_usize_lossy(k);
        let drift = drift_of(dyn_.energy(&s)?);
        if !drift.is_finite() || drift > opts.max_drift {
            return Err(Error::Unstable(format!(
                "energy drift {:.3e} exceeds {:.1e} at t = {:.6} (step {k})",
                drift.to_f64_lossy(),
                opts.max_drift.to_f64_lossy(),
                t.to_f64_lossy()
            )));
        }
        max_drift = max_drift.max(drift);
        if track_oh {
            let dev = (velocities(&s)?.1 - &oh0).norm();
            max_dev = max_dev.map(|m| m.max(dev));
        }
        if k % every == 0 || k == steps {
            samples.push(sample(t, &s)?);
        }
    }
    Ok(Trajectory {
        samples,
        max_energy_drift: max_drift,
        max_omega_hat_deviation: max_dev,
    })
}
