//! Values computed once by an independent dense/sparse reference
//! implementation of the same finite-difference operators, then frozen.

use gltop::haar::p_lambda;
use gltop::liegen::{HalfInt, RotRep};
use gltop::reduced::{build_reduced_hamiltonian, AffineModel, AxisRange, GridSpec, Potential, RelativeAxis};
use gltop::spectra::{eigen_lowest, Method, SolverOptions};

fn scalar_rep() -> RotRep<f64> {
    RotRep::spin(HalfInt::ZERO, 1.0)
}

fn assert_close(got: &[f64], want: &[f64], rel: f64) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= rel * w.abs(), "{got:?} vs {want:?}");
    }
}

#[test]
fn haar_weight_at_unit_spacing() {
    assert!((p_lambda(&[1.0f64, 0.0, -1.0]) - 25.090572839711086).abs() < 1e-12);
}

#[test]
fn relative_mode_on_the_chamber() {
    let spec = GridSpec {
        n: 2,
        chamber_margin: 0.05,
        sl_constraint: true,
        trace: None,
        relative: vec![RelativeAxis { hi: 3.5, points: 99 }],
        flat_measure: false,
    };
    let m = AffineModel::aff_aff(2, 1.0, 0.0, 1.0);
    let h = build_reduced_hamiltonian(&m, &scalar_rep(), &scalar_rep(), &spec, &Potential::None).unwrap();
    let r = eigen_lowest(&h, 3, &SolverOptions::default()).unwrap();
    assert_close(&r.eigenvalues, &[1.8301259472576343, 4.319489481578996, 8.465903513826667], 1e-11);
}

#[test]
fn trace_oscillator_with_relative_mode() {
    let spec = GridSpec {
        n: 2,
        chamber_margin: 0.05,
        sl_constraint: false,
        trace: Some(AxisRange { lo: -6.0, hi: 6.0, points: 40 }),
        relative: vec![RelativeAxis { hi: 3.5, points: 50 }],
        flat_measure: false,
    };
    let m = AffineModel::aff_aff(2, 1.0, 0.0, 1.0);
    let h = build_reduced_hamiltonian(&m, &scalar_rep(), &scalar_rep(), &spec, &Potential::Harmonic { kappa: 1.0 })
        .unwrap();
    let want = [2.1830823361958984, 2.87931222823434, 3.5644421530509844, 4.238185899553737, 4.675841209597604];
    for method in [Method::Dense, Method::ShiftInvert, Method::Lanczos] {
        let r = eigen_lowest(&h, 5, &SolverOptions { method, dense_max: 4000, ..Default::default() }).unwrap();
        assert_close(&r.eigenvalues, &want, 1e-10);
    }
}
