//! Quantum and classical dynamics of affinely-rigid bodies on GL+(n, R) and
//! of the rigid top on SO(3): rotation-group representations, Peter-Weyl
//! coefficients, two-polar coordinates, reduced Hamiltonians on the
//! deformation invariants, sparse eigensolvers and classical integrators.
//!
//! Representation-theoretic and classical code is generic over the real
//! scalar ([`scalar::Real`], implemented for `f32` and `f64`). The reduced
//! Hamiltonians and eigensolvers are `f64` only.

pub mod classical;
pub mod cli;
pub mod config;
pub mod error;
pub mod haar;
pub mod liegen;
pub mod peterweyl;
pub mod reduced;
pub mod rigidbody;
pub mod scalar;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};

pub type RotRep64 = liegen::RotRep<f64>;
pub type RotRep32 = liegen::RotRep<f32>;
pub type PwCoeffs64 = peterweyl::PwCoeffs<f64>;
pub type TopParams64 = rigidbody::TopParams<f64>;
pub type TwoPolar64 = haar::TwoPolar<f64>;
pub type AffineModel64 = reduced::AffineModel<f64>;
pub type AffineState64 = classical::AffineState<f64>;
