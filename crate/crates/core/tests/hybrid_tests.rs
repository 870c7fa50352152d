use measnoise::hybrid::{integrate_master_with, interaction_picture_G};
use measnoise::matrix::kron;
use measnoise::matrix::ops::{annihilation, number, sigma_x, sigma_z};
use measnoise::oracle::discretize_bath;
use measnoise::superop::{build_S, build_hamiltonian_superop};
use measnoise::*;

fn thermal(d: usize, beta_omega: f64) -> DensityMatrix {
    let weights: Vec<f64> = (0..d).map(|n| (-beta_omega * n as f64).exp()).collect();
    let z: f64 = weights.iter().sum();
    let diag: Vec<C64> = weights.iter().map(|w| C64::new(w / z, 0.0)).collect();
    DensityMatrix::single(ComplexMatrix::diag(&diag)).unwrap()
}

/// Driven, dephased qubit coupled through `σ_x` to a thermal mode.
fn generic_model(g: f64) -> HybridModel {
    let system = LindbladModel::new(
        &sigma_z().scale_real(0.5) + &sigma_x().scale_real(0.3),
        vec![sigma_z().scale_real(0.3)],
    )
    .unwrap();
    let b = annihilation(3);
    let coupling = FactorizedCoupling::new(2, 3, vec![(sigma_x(), (&b + &b.dagger()).scale_real(g))]).unwrap();
    let sys0 = DensityMatrix::qubit(0.8, C64::new(0.1, 0.25)).unwrap();
    HybridModel::new(system, number(3).scale_real(1.3), coupling, thermal(3, 0.7), sys0).unwrap()
}

fn dephasing_model(eta: f64) -> HybridModel {
    let p = DephasingParams::new(1.0, 0.4, eta, 1.0).unwrap();
    let bath = discretize_bath(&p, 6, 6.0, 2).unwrap();
    let sys0 = DensityMatrix::qubit(0.5, C64::new(0.5, 0.0)).unwrap();
    HybridModel::dephasing(&p, &bath, sys0).unwrap()
}

fn final_state(model: &HybridModel, t_max: f64, opts: &MasterOptions) -> ComplexMatrix {
    integrate_master_with(model, t_max, opts).unwrap().last().unwrap().1.clone()
}

#[test]
fn interaction_picture_coupling_expands_linearly() {
    let model = generic_model(0.2);
    let (ds, db) = (2, 3);
    let free = build_S(&model.system().lift(db))
        .unwrap()
        .add(&build_hamiltonian_superop(&kron(&ComplexMatrix::identity(ds), &number(db).scale_real(1.3))).unwrap())
        .unwrap();
    let f = build_hamiltonian_superop(&model.coupling_operator().to_dense()).unwrap();
    let commutator = &(f.mat() * free.mat()) - &(free.mat() * f.mat());

    let residual = |t: f64| {
        let g = interaction_picture_G(&model, t).unwrap();
        let linear = f.mat() + &commutator.scale_real(t);
        g.mat().max_abs_diff(&linear)
    };
    let (r1, r2) = (residual(1e-3), residual(2e-3));
    assert!(r1 < 1e-5);
    assert!((r2 / r1 - 4.0).abs() < 0.05, "ratio {}", r2 / r1);

    let t = 0.7;
    let exact = free.exp(-t).unwrap().compose(&f).unwrap().compose(&free.exp(t).unwrap()).unwrap();
    assert!(interaction_picture_G(&model, t).unwrap().mat().max_abs_diff(exact.mat()) <= 1e-10);
}

#[test]
fn nonzero_bath_mean_is_refused() {
    let system = LindbladModel::unitary(sigma_z()).unwrap();
    let coupling = FactorizedCoupling::new(2, 3, vec![(sigma_z(), number(3).scale_real(0.2))]).unwrap();
    let sys0 = DensityMatrix::qubit(0.5, C64::new(0.3, 0.0)).unwrap();
    let model = HybridModel::new(system, number(3), coupling, thermal(3, 0.5), sys0).unwrap();
    let err = integrate_master_with(&model, 1.0, &MasterOptions::new(0.05)).unwrap_err();
    assert!(matches!(err, Error::Precondition { .. }), "{err}");
}

#[test]
fn recovered_states_are_hermitian_with_unit_trace() {
    for model in [generic_model(0.2), dephasing_model(0.25)] {
        let traj = integrate_master_with(&model, 3.0, &MasterOptions::new(0.02)).unwrap();
        for s in traj.states() {
            assert!(s.hermiticity_error() <= 1e-8);
            assert!((s.trace() - C64::new(1.0, 0.0)).norm() <= 1e-6);
        }
    }
}

#[test]
fn routes_agree_on_generic_model() {
    let model = generic_model(0.2);
    let base = MasterOptions::new(0.05);
    let a = final_state(&model, 1.5, &base.with_route(KernelRoute::Correlation));
    let b = final_state(&model, 1.5, &base.with_route(KernelRoute::Joint));
    assert!(a.max_abs_diff(&b) <= 1e-10);
}

fn halving_ratios(model: &HybridModel, inner: InnerRule) -> Vec<f64> {
    let finals: Vec<ComplexMatrix> = [0.2, 0.1, 0.05, 0.025]
        .into_iter()
        .map(|dt| final_state(model, 2.0, &MasterOptions::new(dt).with_inner(inner)))
        .collect();
    let diffs: Vec<f64> = finals.windows(2).map(|w| w[0].max_abs_diff(&w[1])).collect();
    diffs.windows(2).map(|w| w[0] / w[1]).collect()
}

#[test]
fn simpson_inner_rule_is_fourth_order() {
    for model in [dephasing_model(0.25), generic_model(0.2)] {
        let ratios = halving_ratios(&model, InnerRule::Simpson);
        let last = *ratios.last().unwrap();
        assert!((12.0..=20.0).contains(&last), "{ratios:?}");
    }
}

#[test]
fn trapezoid_inner_rule_is_second_order() {
    let ratios = halving_ratios(&dephasing_model(0.25), InnerRule::Trapezoid);
    let last = *ratios.last().unwrap();
    assert!((3.5..=4.5).contains(&last), "{ratios:?}");
}

#[test]
fn decay_exponent_is_quadratic_in_coupling() {
    // Quartering η halves every g_k.
    let t = 2.0;
    let opts = MasterOptions::new(0.02);
    let coherence = |eta: f64| final_state(&dephasing_model(eta), t, &opts)[(0, 1)].norm();
    let baseline = coherence(0.0);
    let exponent = |eta: f64| -(coherence(eta) / baseline).ln();
    let ratio = exponent(0.2) / exponent(0.05);
    assert!((ratio - 4.0).abs() <= 0.2, "ratio {ratio}");
}
