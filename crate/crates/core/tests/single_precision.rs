use gltop::classical::{kinetic_energy, AffineState};
use gltop::haar::{p_l, two_polar};
use gltop::liegen::HalfInt;
use gltop::reduced::AffineModel;
use gltop::rigidbody::{top_spectrum, TopParams};
use gltop::RotRep32;
use nalgebra::DMatrix;

#[test]
fn asymmetric_top_in_f32() {
    let p = TopParams::new(1.0f32, 2.0, 3.0, 1.0).unwrap();
    let e = top_spectrum(&RotRep32::spin(HalfInt::ONE, 1.0), &p).unwrap().energies();
    for (g, w) in e.iter().zip([5.0f32 / 12.0, 2.0 / 3.0, 0.75]) {
        assert!((g - w).abs() < 1e-5, "{e:?}");
    }
}

#[test]
fn two_polar_and_kinetic_energy_in_f32() {
    let phi = DMatrix::from_row_slice(2, 2, &[1.5f32, 0.2, -0.3, 0.8]);
    let tp = two_polar(&phi).unwrap();
    assert!((tp.reconstruct() - &phi).amax() < 1e-5);
    assert_eq!(p_l(&[2.0f32, 1.0]), 9.0);
    let s = AffineState::new(DMatrix::identity(2, 2), DMatrix::identity(2, 2)).unwrap();
    let t = kinetic_energy(&AffineModel::aff_aff(2, 1.0f32, 0.0, 1.0), &s).unwrap();
    assert!((t - 1.0).abs() < 1e-6);
}
