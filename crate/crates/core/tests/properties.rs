use approx::assert_relative_eq;
use nalgebra::{Complex, DMatrix, Vector3};
use proptest::prelude::*;

use gltop::classical::{geodesic, kinetic_energy, velocities, AffineState};
use gltop::haar::{p_l, p_lambda, two_polar};
use gltop::liegen::{su2, wigner_d, HalfInt, RotRep};
use gltop::peterweyl::{left_translate, right_translate, synth, PwCoeffs};
use gltop::reduced::{
    build_coupling_ops, build_reduced_hamiltonian, AffineModel, AxisRange, GridSpec, ModelKind, Potential,
    RelativeAxis,
};
use gltop::rigidbody::{top_spectrum, TopParams};
use gltop::spectra::{eigen_lowest, Method, SolverOptions, RESIDUAL_CONTRACT};

type C64 = Complex<f64>;

fn spin(tw: u32) -> RotRep<f64> {
    RotRep::spin(HalfInt::from_twice(tw), 1.0)
}

fn rotvec() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.0..6.0f64).prop_map(|(x, y, z, len)| {
        let v = Vector3::new(x, y, z);
        if v.norm() < 1e-3 {
            Vector3::new(0.0, 0.0, len)
        } else {
            v.normalize() * len
        }
    })
}

fn matrix(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(lo..hi, n * n).prop_map(move |v| DMatrix::from_row_slice(n, n, &v))
}

fn positive_matrix(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    matrix(n, -0.6, 0.6).prop_map(move |m| m + DMatrix::identity(n, n) * 1.5)
}

fn rotation(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    matrix(n, -1.0, 1.0).prop_filter_map("rank", move |m| {
        if m.determinant().abs() < 1e-3 {
            return None;
        }
        let mut q = m.qr().q();
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        Some(q)
    })
}

fn cmax(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn block(tw: u32, seed: &[f64]) -> DMatrix<C64> {
    let d = tw as usize + 1;
    DMatrix::from_fn(d, d, |r, c| {
        let k = (r * d + c) % seed.len();
        C64::new(seed[k], seed[(k + 1) % seed.len()] * 0.5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rep_residuals_for_any_hbar(tw in 0u32..=8, hbar in 0.2..3.0f64) {
        let r = RotRep::spin(HalfInt::from_twice(tw), hbar).residuals();
        let scale = hbar * hbar * (1.0 + tw as f64).powi(2);
        prop_assert!(r.commutator < 1e-12 * scale && r.casimir < 1e-12 * scale);
    }

    #[test]
    fn wigner_d_is_unitary(tw in 0u32..=6, k in rotvec()) {
        let d = wigner_d(&spin(tw), &k).unwrap();
        let id = DMatrix::<C64>::identity(d.nrows(), d.ncols());
        prop_assert!(cmax(&(d.adjoint() * &d - &id)) < 1e-12);
        if tw % 2 == 0 {
            prop_assert!((d.determinant() - C64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn wigner_d_is_a_homomorphism(tw in 0u32..=6, k1 in rotvec(), k2 in rotvec()) {
        let rep = spin(tw);
        let k12 = su2::compose(&k1, &k2);
        let lhs = wigner_d(&rep, &k12).unwrap();
        let rhs = wigner_d(&rep, &k1).unwrap() * wigner_d(&rep, &k2).unwrap();
        prop_assert!(cmax(&(lhs - rhs)) < 1e-10);
    }

    #[test]
    fn antipode_flips_half_odd_blocks(tw in 0u32..=5, k in rotvec()) {
        let rep = spin(tw);
        let sign = if tw % 2 == 0 { 1.0 } else { -1.0 };
        let d = wigner_d(&rep, &k).unwrap();
        let da = wigner_d(&rep, &su2::antipode(&k)).unwrap();
        prop_assert!(cmax(&(da - d * C64::new(sign, 0.0))) < 1e-10);
    }

    #[test]
    fn pure_parity_has_projective_density(
        seed in prop::collection::vec(-1.0..1.0f64, 5),
        k in rotvec(),
        fermionic in any::<bool>(),
    ) {
        let (a, b) = if fermionic { (1, 3) } else { (0, 2) };
        let c = PwCoeffs::new()
            .with(HalfInt::from_twice(a), block(a, &seed)).unwrap()
            .with(HalfInt::from_twice(b), block(b, &seed)).unwrap();
        let x = synth(&c, &k).unwrap().norm_sqr();
        let y = synth(&c, &su2::antipode(&k)).unwrap().norm_sqr();
        prop_assert!((x - y).abs() < 1e-9 * (1.0 + x));
    }

    #[test]
    fn synth_is_linear(s1 in prop::collection::vec(-1.0..1.0f64, 4), s2 in prop::collection::vec(-1.0..1.0f64, 4),
                       alpha in -2.0..2.0f64, k in rotvec()) {
        let mk = |s: &[f64]| PwCoeffs::new()
            .with(HalfInt::HALF, block(1, s)).unwrap()
            .with(HalfInt::ONE, block(2, s)).unwrap();
        let (c1, c2) = (mk(&s1), mk(&s2));
        let a = C64::new(alpha, 0.3);
        let comb = c1.combine(a, &c2, C64::new(1.0, 0.0));
        let want = synth(&c1, &k).unwrap() * a + synth(&c2, &k).unwrap();
        prop_assert!((synth(&comb, &k).unwrap() - want).norm() < 1e-10);
    }

    #[test]
    fn left_and_right_translations_commute(s in prop::collection::vec(-1.0..1.0f64, 4), v in rotvec(), w in rotvec()) {
        let c = PwCoeffs::new().with(HalfInt::ONE, block(2, &s)).unwrap();
        let lr = right_translate(&left_translate(&c, &v).unwrap(), &w).unwrap();
        let rl = left_translate(&right_translate(&c, &w).unwrap(), &v).unwrap();
        prop_assert!(cmax(&(lr.get(HalfInt::ONE).unwrap() - rl.get(HalfInt::ONE).unwrap())) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn isotropic_top_collapses(tw in 0u32..=8, i in 0.2..5.0f64) {
        let p = TopParams::new(i, i, i, 1.0).unwrap();
        let s = top_spectrum(&spin(tw), &p).unwrap();
        let want = HalfInt::from_twice(tw).casimir::<f64>() / (2.0 * i);
        prop_assert_eq!(s.levels.len(), 1);
        prop_assert!((s.levels[0].0 - want).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn top_permutation_covariance(tw in 0u32..=6, i in prop::array::uniform3(0.2..5.0f64)) {
        let e = |a: f64, b: f64, c: f64| top_spectrum(&spin(tw), &TopParams::new(a, b, c, 1.0).unwrap()).unwrap().energies();
        let base = e(i[0], i[1], i[2]);
        for perm in [e(i[1], i[2], i[0]), e(i[2], i[0], i[1]), e(i[1], i[0], i[2])] {
            for (x, y) in base.iter().zip(&perm) {
                prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1e-12));
            }
        }
    }

    #[test]
    fn top_inertia_scaling(tw in 0u32..=6, i in prop::array::uniform3(0.2..5.0f64), lambda in 0.25..4.0f64) {
        let e = |s: f64| top_spectrum(&spin(tw), &TopParams::new(s * i[0], s * i[1], s * i[2], 1.0).unwrap()).unwrap().energies();
        for (x, y) in e(1.0).iter().zip(e(lambda)) {
            prop_assert!((x / lambda - y).abs() <= 1e-12 * x.abs().max(1e-12));
        }
    }

    #[test]
    fn half_odd_top_spectra_are_real_doublets(tw in (0u32..=3).prop_map(|k| 2 * k + 1), i in prop::array::uniform3(0.2..5.0f64)) {
        let s = top_spectrum(&spin(tw), &TopParams::new(i[0], i[1], i[2], 1.0).unwrap()).unwrap();
        prop_assert_eq!(s.energies().len(), tw as usize + 1);
        prop_assert!(s.levels.iter().all(|l| l.0.is_finite() && l.0 > 0.0 && l.1 % 2 == 0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn p_lambda_depends_on_differences(q in prop::collection::vec(-1.5..1.5f64, 2..5), c in -3.0..3.0f64) {
        let a = p_lambda(&q);
        let shifted: Vec<f64> = q.iter().map(|x| x + c).collect();
        let mut rev = q.clone();
        rev.reverse();
        prop_assert!((a - p_lambda(&shifted)).abs() <= 1e-9 * a.abs().max(1e-300));
        prop_assert!((a - p_lambda(&rev)).abs() <= 1e-12 * a.abs().max(1e-300));
    }

    #[test]
    fn densities_vanish_on_coincidence(q in prop::collection::vec(0.1..3.0f64, 2..5), i in 0usize..4, j in 0usize..4) {
        let (i, j) = (i % q.len(), j % q.len());
        prop_assume!(i != j);
        let mut c = q.clone();
        c[j] = c[i];
        prop_assert_eq!(p_lambda(&c), 0.0);
        prop_assert_eq!(p_l(&c), 0.0);
        let distinct = (0..q.len()).all(|a| (0..a).all(|b| q[a] != q[b]));
        if distinct {
            prop_assert!(p_lambda(&q) > 0.0 && p_l(&q) > 0.0);
        }
    }

    #[test]
    fn two_polar_reconstructs(phi in positive_matrix(3)) {
        prop_assume!(phi.determinant() > 0.1);
        let tp = two_polar(&phi).unwrap();
        prop_assert!((tp.reconstruct() - &phi).norm() <= 1e-10 * phi.norm());
        let sv = phi.singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in tp.q_big.iter().zip(&sv) {
            prop_assert!((a - b).abs() <= 1e-12 * b);
        }
        prop_assert!((tp.l.determinant() - 1.0).abs() < 1e-12 && (tp.r.determinant() - 1.0).abs() < 1e-12);
    }
}

fn small_grid(linear: bool, nt: usize, nx: usize) -> GridSpec {
    GridSpec {
        n: 2,
        chamber_margin: 0.05,
        sl_constraint: false,
        trace: Some(if linear {
            AxisRange { lo: 0.0, hi: 2.5, points: nt }
        } else {
            AxisRange { lo: -2.0, hi: 2.0, points: nt }
        }),
        relative: vec![RelativeAxis { hi: 2.5, points: nx }],
        flat_measure: false,
    }
}

fn valid_pair() -> impl Strategy<Value = (u32, u32)> {
    prop::sample::select(vec![(0, 0), (0, 2), (2, 0), (2, 2), (1, 1), (1, 3), (3, 1), (3, 3)])
}

fn model_kind() -> impl Strategy<Value = ModelKind> {
    prop::sample::select(ModelKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduced_dimension_and_hermiticity(kind in model_kind(), (ts, tj) in valid_pair(), nt in 1usize..8, nx in 1usize..8) {
        let m = AffineModel { i: 2.0, ..AffineModel::aff_aff(2, 1.0, 0.1, 1.0) }.with_kind(kind);
        let g = small_grid(kind == ModelKind::DAlembert, nt, nx);
        let h = build_reduced_hamiltonian(&m, &spin(ts), &spin(tj), &g, &Potential::Harmonic { kappa: 0.7 }).unwrap();
        prop_assert_eq!(h.dim(), nt * nx * (ts as usize + 1) * (tj as usize + 1));
        prop_assert!(h.matrix.hermiticity_residual() < 1e-12);
    }

    #[test]
    fn coupling_sign_structure(node in 0usize..9, (ts, tj) in valid_pair()) {
        // log chart: +X_-^2 / (16 A sinh^2(x/2)) - X_+^2 / (16 A cosh^2(x/2)) on top of the scalar part
        let m = AffineModel::aff_aff(2, 1.3, 0.0, 1.0);
        let g = GridSpec { sl_constraint: true, trace: None, flat_measure: true, ..small_grid(false, 0, 9) };
        let h0 = build_reduced_hamiltonian(&m, &spin(0), &spin(0), &g, &Potential::None).unwrap();
        let h = build_reduced_hamiltonian(&m, &spin(ts), &spin(tj), &g, &Potential::None).unwrap();
        let fd = h.fiber_dim;
        let x = h.grid.axes()[0].at(node as f64);
        let (xm, xp) = build_coupling_ops(&spin(ts), &spin(tj), 0, 1).unwrap();
        let want = (&xm * &xm) * C64::new(1.0 / (16.0 * 1.3 * (0.5 * x).sinh().powi(2)), 0.0)
            - (&xp * &xp) * C64::new(1.0 / (16.0 * 1.3 * (0.5 * x).cosh().powi(2)), 0.0);
        let base = h0.matrix.get(node, node);
        for r in 0..fd {
            for c in 0..fd {
                let got = h.matrix.get(node * fd + r, node * fd + c) - if r == c { base } else { C64::new(0.0, 0.0) };
                prop_assert!((got - want[(r, c)]).norm() < 1e-12 * (1.0 + want[(r, c)].norm()));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn dense_and_iterative_agree(kind in model_kind(), (ts, tj) in valid_pair(), nt in 6usize..12, nx in 6usize..12, seed in 0u64..100) {
        let m = AffineModel { i: 2.0, ..AffineModel::aff_aff(2, 1.0, 0.1, 1.0) }.with_kind(kind);
        let g = small_grid(kind == ModelKind::DAlembert, nt, nx);
        let h = build_reduced_hamiltonian(&m, &spin(ts), &spin(tj), &g, &Potential::Harmonic { kappa: 0.7 }).unwrap();
        prop_assume!(h.dim() <= 2000);
        let k = 4;
        let run = |method| eigen_lowest(&h, k, &SolverOptions { method, seed, ..Default::default() }).unwrap();
        let dense = run(Method::Dense);
        for method in [Method::Lanczos, Method::ShiftInvert] {
            let it = run(method);
            for (a, b) in dense.eigenvalues.iter().zip(&it.eigenvalues) {
                prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{method:?}: {a} vs {b}");
            }
            prop_assert!(it.residuals.iter().all(|r| *r <= RESIDUAL_CONTRACT * it.norm_estimate));
        }
        prop_assert!(dense.residuals.iter().all(|r| *r <= RESIDUAL_CONTRACT * dense.norm_estimate));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn affine_kinetic_energy_via_either_velocity(phi in positive_matrix(3), v in matrix(3, -1.0, 1.0), a in 0.5..2.0f64, b in -0.5..0.5f64) {
        prop_assume!(phi.determinant() > 0.1);
        let s = AffineState::new(phi, v).unwrap();
        let (om, oh) = velocities(&s).unwrap();
        let t = |w: &DMatrix<f64>| 0.5 * a * (w * w).trace() + 0.5 * b * w.trace().powi(2);
        let (x, y) = (t(&om), t(&oh));
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        let direct = kinetic_energy(&AffineModel::aff_aff(3, a, b, 1.0), &s).unwrap();
        prop_assert!((direct - y).abs() <= 1e-12 * y.abs().max(1.0));
    }

    #[test]
    fn one_sided_invariances(phi in positive_matrix(3), v in matrix(3, -1.0, 1.0), u in rotation(3), i in 0.5..3.0f64) {
        prop_assume!(phi.determinant() > 0.1);
        let base = AffineModel { i, ..AffineModel::aff_aff(3, 0.4, 0.1, 1.0) };
        let s = AffineState::new(phi.clone(), v.clone()).unwrap();
        let left = AffineState::new(&u * &phi, &u * &v).unwrap();
        let right = AffineState::new(&phi * &u, &v * &u).unwrap();
        let met_aff = base.with_kind(ModelKind::MetAff);
        let aff_met = base.with_kind(ModelKind::AffMet);
        let t0 = kinetic_energy(&met_aff, &s).unwrap();
        prop_assert!((kinetic_energy(&met_aff, &left).unwrap() - t0).abs() <= 1e-12 * t0.abs().max(1.0));
        let t1 = kinetic_energy(&aff_met, &s).unwrap();
        prop_assert!((kinetic_energy(&aff_met, &right).unwrap() - t1).abs() <= 1e-12 * t1.abs().max(1.0));
    }

    #[test]
    fn exp_geodesic_keeps_body_velocity(phi in positive_matrix(2), v in matrix(2, -0.8, 0.8), t in 0.0..2.0f64) {
        prop_assume!(phi.determinant() > 0.1);
        let m = AffineModel::aff_aff(2, 1.0, 0.2, 1.0);
        let s = AffineState::new(phi, v).unwrap();
        let g = geodesic(&m, &s, t).unwrap();
        let (_, oh0) = velocities(&s).unwrap();
        let (_, oh) = velocities(&g).unwrap();
        prop_assert!((oh - &oh0).amax() <= 1e-12 * oh0.amax().max(1.0));
        let (e0, e) = (kinetic_energy(&m, &s).unwrap(), kinetic_energy(&m, &g).unwrap());
        assert_relative_eq!(e0, e, epsilon = 1e-12, max_relative = 1e-12);
    }
}
