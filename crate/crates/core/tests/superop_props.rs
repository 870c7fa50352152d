mod common;

use measnoise::density::{trace_out_bath, StateDiagnostics};
use measnoise::matrix::kron;
use measnoise::projection::{apply_P, apply_Q};
use measnoise::superop::{
    apply_exp, build_F, build_S, build_dissipator, build_hamiltonian_superop, check_commute,
    Generator,
};
use measnoise::*;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_model(rng: &mut ChaCha8Rng, n: usize, jumps: usize) -> LindbladModel {
    let h = common::random_hermitian(rng, n);
    let ls = (0..jumps).map(|_| common::random_matrix(rng, n).scale_real(0.5)).collect();
    LindbladModel::new(h, ls).unwrap()
}

fn random_coupling(rng: &mut ChaCha8Rng, ds: usize, db: usize) -> FactorizedCoupling {
    let pairs = (0..2)
        .map(|_| (common::random_hermitian(rng, ds), common::random_hermitian(rng, db)))
        .collect();
    FactorizedCoupling::new(ds, db, pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generators_annihilate_trace(seed in any::<u64>(), n in 2usize..=4, db in 2usize..=3) {
        let mut rng = common::rng(seed);
        let x = common::random_hermitian(&mut rng, n);
        let model = random_model(&mut rng, n, 2);
        let gens = [
            build_hamiltonian_superop(model.hamiltonian()).unwrap(),
            build_dissipator(&model.lindblads()[0]).unwrap(),
            build_S(&model).unwrap(),
        ];
        for g in &gens {
            prop_assert!(g.apply(&x).unwrap().trace().norm() <= 1e-10);
        }
        let f = build_F(&random_coupling(&mut rng, n, db)).unwrap();
        let xj = common::random_hermitian(&mut rng, n * db);
        prop_assert!(f.apply(&xj).unwrap().trace().norm() <= 1e-10);
    }

    #[test]
    fn free_bath_evolution_keeps_reduced_trace(seed in any::<u64>(), db in 2usize..=4, t in 0.0f64..5.0) {
        let mut rng = common::rng(seed);
        let ds = 2;
        let hb = kron(&ComplexMatrix::identity(ds), &common::random_hermitian(&mut rng, db));
        let b = build_hamiltonian_superop(&hb).unwrap();
        let x = common::random_matrix(&mut rng, ds * db);
        let evolved = apply_exp(&b, -t, &x).unwrap();
        let lhs = trace_out_bath(&evolved, ds, db).unwrap();
        let rhs = trace_out_bath(&x, ds, db).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9);
    }

    #[test]
    fn system_and_bath_generators_commute(seed in any::<u64>(), db in 2usize..=3) {
        let mut rng = common::rng(seed);
        let s = build_S(&random_model(&mut rng, 2, 1).lift(db)).unwrap();
        let hb = kron(&ComplexMatrix::identity(2), &common::random_hermitian(&mut rng, db));
        let b = build_hamiltonian_superop(&hb).unwrap();
        prop_assert!(check_commute(&b, &s).unwrap() <= 1e-12);
    }

    #[test]
    fn vectorized_matches_direct(seed in any::<u64>(), n in 1usize..=4, db in 2usize..=3) {
        let mut rng = common::rng(seed);
        let model = random_model(&mut rng, n, 2);
        let x = common::random_matrix(&mut rng, n);
        let h = model.hamiltonian();
        let l = &model.lindblads()[0];

        let direct_h = common::commutator_action(h, &x);
        prop_assert!(build_hamiltonian_superop(h).unwrap().apply(&x).unwrap().max_abs_diff(&direct_h) <= 1e-11);

        let direct_d = common::dissipator_action(l, &x);
        prop_assert!(build_dissipator(l).unwrap().apply(&x).unwrap().max_abs_diff(&direct_d) <= 1e-11);

        let mut direct_s = direct_h.clone();
        for lk in model.lindblads() {
            direct_s += &common::dissipator_action(lk, &x);
        }
        prop_assert!(build_S(&model).unwrap().apply(&x).unwrap().max_abs_diff(&direct_s) <= 1e-11);
        prop_assert!(model.apply(&x).unwrap().max_abs_diff(&direct_s) <= 1e-11);
        prop_assert!(Generator::from_model(&model).unwrap().apply(&x).unwrap().max_abs_diff(&direct_s) <= 1e-11);

        let coupling = random_coupling(&mut rng, n, db);
        let xj = common::random_matrix(&mut rng, n * db);
        let direct_f = common::commutator_action(&coupling.hamiltonian(), &xj);
        prop_assert!(build_F(&coupling).unwrap().apply(&xj).unwrap().max_abs_diff(&direct_f) <= 1e-11);
        prop_assert!(coupling.apply(&xj).unwrap().max_abs_diff(&direct_f) <= 1e-11);
    }

    #[test]
    fn exponential_is_a_semigroup(seed in any::<u64>(), n in 2usize..=3, t in 0.0f64..2.0, tp in 0.0f64..2.0) {
        let mut rng = common::rng(seed);
        let s = build_S(&random_model(&mut rng, n, 2)).unwrap();
        let x = common::random_matrix(&mut rng, n);
        let two_steps = apply_exp(&s, t, &apply_exp(&s, tp, &x).unwrap()).unwrap();
        let one_step = apply_exp(&s, t + tp, &x).unwrap();
        prop_assert!(two_steps.max_abs_diff(&one_step) <= 1e-9);
    }

    #[test]
    fn lindblad_flow_maps_states_to_states(seed in any::<u64>(), n in 2usize..=4, t in 0.0f64..3.0) {
        let mut rng = common::rng(seed);
        let s = build_S(&random_model(&mut rng, n, 2)).unwrap();
        let rho = common::random_density(&mut rng, n);
        let out = apply_exp(&s, t, rho.mat()).unwrap();
        let diag = StateDiagnostics::of(&out).unwrap();
        prop_assert!(diag.within(&Tolerances::DEFAULT), "{diag:?}");
        prop_assert!(DensityMatrix::single(out).is_ok());
    }

    #[test]
    fn projector_algebra(seed in any::<u64>(), ds in 1usize..=3, db in 1usize..=3) {
        let mut rng = common::rng(seed);
        let p = ThermoProjector::new(common::random_density(&mut rng, db), ds).unwrap();
        let x = common::random_matrix(&mut rng, ds * db);
        let px = apply_P(&p, &x).unwrap();
        let qx = apply_Q(&p, &x).unwrap();
        prop_assert!(apply_P(&p, &px).unwrap().max_abs_diff(&px) <= 1e-12);
        prop_assert!(apply_Q(&p, &qx).unwrap().max_abs_diff(&qx) <= 1e-12);
        prop_assert!(apply_P(&p, &qx).unwrap().max_abs() <= 1e-12);
        prop_assert!(apply_Q(&p, &px).unwrap().max_abs() <= 1e-12);
        prop_assert!((&px + &qx).max_abs_diff(&x) <= 1e-12);
        prop_assert!((px.trace() - x.trace()).norm() <= 1e-12);
    }

    #[test]
    fn complement_kills_factorized_state(seed in any::<u64>(), ds in 1usize..=3, db in 1usize..=3) {
        let mut rng = common::rng(seed);
        let rho_b = common::random_density(&mut rng, db);
        let rho_s = common::random_density(&mut rng, ds);
        let p = ThermoProjector::new(rho_b.clone(), ds).unwrap();
        let alpha0 = kron(rho_s.mat(), rho_b.mat());
        prop_assert!(apply_Q(&p, &alpha0).unwrap().max_abs() <= 1e-12);
        prop_assert!(apply_P(&p, &alpha0).unwrap().max_abs_diff(&alpha0) <= 1e-12);
    }
}

#[test]
fn column_stacking_convention() {
    let mut rng = common::rng(3);
    let (a, x, b) = (
        common::random_matrix(&mut rng, 3),
        common::random_matrix(&mut rng, 3),
        common::random_matrix(&mut rng, 3),
    );
    let lhs = (&(&a * &x) * &b).vec_cols();
    let rhs = kron(&b.transpose(), &a).apply(&x.vec_cols());
    let diff = lhs.iter().zip(&rhs).map(|(l, r)| (l - r).norm()).fold(0.0, f64::max);
    assert!(diff <= 1e-13);
    let sandwich = Superoperator::sandwich(&a, &b).unwrap().apply(&x).unwrap();
    assert!(sandwich.max_abs_diff(&(&(&a * &x) * &b)) <= 1e-13);
}

#[test]
fn projector_keeps_system_first() {
    let rho_b = DensityMatrix::basis(3, 1).unwrap();
    let p = ThermoProjector::new(rho_b, 2).unwrap();
    let r = ComplexMatrix::from_real_rows(&[[0.25, 0.5], [0.5, 0.75]]);
    let embedded = p.embed(&r).unwrap();
    // Bath index 1 sits inside each system block.
    assert_eq!(embedded[(1, 1)], C64::new(0.25, 0.0));
    assert_eq!(embedded[(1, 4)], C64::new(0.5, 0.0));
    assert_eq!(p.reduce(&embedded).unwrap(), r);
}
