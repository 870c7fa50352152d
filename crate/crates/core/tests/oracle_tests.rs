use measnoise::dephasing::analytic_trajectory;
use measnoise::oracle::{
    compare, compare_with_horizon, discretize_bath, evolve_full, evolve_full_with, midpoint_bath,
};
use measnoise::*;

fn rho0() -> DensityMatrix {
    DensityMatrix::qubit(0.5, C64::new(0.5, 0.0)).unwrap()
}

fn weak() -> DephasingParams {
    DephasingParams::new(1.0, 0.5, 0.05, 1.0).unwrap()
}

#[test]
fn desk_configuration_stays_physical() {
    let p = DephasingParams::new(1.0, 0.5, 0.25, 1.0).unwrap();
    let start = DensityMatrix::qubit(0.7, C64::new(0.2, 0.3)).unwrap();
    let bath = discretize_bath(&p, 4, 6.0, 3).unwrap();
    let model = FullModel::new(p, bath, start).unwrap();
    assert_eq!(model.joint_dim(), 162);
    let traj = evolve_full(&model, 1.5, 0.01).unwrap();
    let joint = traj.joint_monitor.as_ref().unwrap();
    assert!(joint.max_hermiticity <= 1e-9, "{joint:?}");
    assert!(joint.max_trace_error <= 1e-8, "{joint:?}");
    assert!(joint.min_eigenvalue >= -1e-7, "{joint:?}");
    assert!(traj.monitor.within(&Tolerances::INTEGRATED));
    for s in traj.states() {
        assert!((s[(0, 0)].re - 0.7).abs() <= 1e-8);
    }
}

#[test]
fn measurement_only_run_matches_closed_form() {
    let p = DephasingParams::new(0.8, 0.6, 0.0, 1.0).unwrap();
    let bath = discretize_bath(&p, 3, 6.0, 2).unwrap();
    let traj = evolve_full(&FullModel::new(p, bath, rho0()).unwrap(), 2.0, 0.01).unwrap();
    let closed = analytic_trajectory(&p, &rho0(), traj.times()).unwrap();
    assert!(compare(&traj, &closed).unwrap().max_dev <= 1e-8);
}

#[test]
fn fock_truncation_is_converged_at_weak_coupling() {
    let p = weak();
    let small = discretize_bath(&p, 4, 6.0, 2).unwrap();
    let large = small.with_fock_dim(4).unwrap();
    let final_coherence = |bath: BathDiscretization| {
        let opts = OracleOptions {
            check_joint_positivity: false,
            ..OracleOptions::new(0.01).with_stride(50)
        };
        let traj = evolve_full_with(&FullModel::new(p, bath, rho0()).unwrap(), 1.5, &opts).unwrap();
        traj.last().unwrap().1[(0, 1)].norm()
    };
    let diff = (final_coherence(small) - final_coherence(large)).abs();
    assert!(diff <= 1e-3, "diff {diff}");
}

#[test]
fn finer_bath_approaches_continuum() {
    let p = weak();
    let deviation = |n: usize| {
        let bath = discretize_bath(&p, n, 6.0, 2).unwrap();
        let opts = OracleOptions {
            check_joint_positivity: false,
            ..OracleOptions::new(0.01).with_stride(10)
        };
        let traj = evolve_full_with(&FullModel::new(p, bath, rho0()).unwrap(), 2.0, &opts).unwrap();
        let closed = analytic_trajectory(&p, &rho0(), traj.times()).unwrap();
        traj.coherence_abs()
            .iter()
            .zip(closed.coherence_abs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let devs: Vec<f64> = [2, 4, 8].into_iter().map(deviation).collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
}

#[test]
fn recurrence_horizon_is_flagged() {
    let p = weak();
    let bath = discretize_bath(&p, 2, 6.0, 2).unwrap();
    let horizon = bath.recurrence_time().unwrap();
    assert!((horizon - std::f64::consts::TAU / 3.0).abs() < 1e-12);
    let traj = evolve_full(&FullModel::new(p, bath, rho0()).unwrap(), 3.0, 0.01).unwrap();
    let closed = analytic_trajectory(&p, &rho0(), traj.times()).unwrap();
    let report = compare_with_horizon(&traj, &closed, Some(horizon)).unwrap();
    assert!(!report.beyond_horizon.is_empty());
    assert!(report.beyond_horizon.iter().all(|&t| t >= horizon));
    assert!(report.max_coherence_rel_in(0.0, horizon) < 0.05);
}

#[test]
fn oversized_joint_spaces_are_refused() {
    let p = weak();
    let bath = discretize_bath(&p, 8, 6.0, 3).unwrap();
    let model = FullModel::new(p, bath, rho0()).unwrap();
    assert!(matches!(
        evolve_full(&model, 1.0, 0.01),
        Err(Error::Precondition { .. })
    ));
    let huge = midpoint_bath(&p, 200, 6.0, 2).unwrap();
    assert!(FullModel::new(p, huge, rho0()).is_err());
}

#[test]
fn tail_truncation_is_rejected() {
    let p = weak();
    assert!(discretize_bath(&p, 4, 2.0, 3).is_err());
    assert!(midpoint_bath(&p, 4, 2.0, 3).is_ok());
}

#[test]
fn stride_keeps_final_time() {
    let p = weak();
    let bath = discretize_bath(&p, 1, 6.0, 2).unwrap();
    let model = FullModel::new(p, bath, rho0()).unwrap();
    let traj = evolve_full_with(&model, 1.05, &OracleOptions::new(0.05).with_stride(4)).unwrap();
    let times = traj.times();
    assert_eq!(times.first(), Some(&0.0));
    assert_eq!(times.last(), Some(&1.05));
    assert_eq!(times.len(), 7);
}
