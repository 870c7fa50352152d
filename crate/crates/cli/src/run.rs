//! Engine dispatch and CSV rendering.

use std::fmt::Write as _;

use measnoise::dephasing::{analytic_trajectory, ohmic_kernel, time_grid};
use measnoise::density::purity;
use measnoise::hybrid::integrate_master_with;
use measnoise::oracle::{compare, discretize_bath, evolve_full_with};
use measnoise::quadrature::ohmic_kernel_quadrature;
use measnoise::{Error, FullModel, HybridModel, MasterOptions, OracleOptions, Tolerances, Trajectory, C64};

use crate::config::{Mode, RunConfig};

pub const TRAJECTORY_HEADER: &str = "t,rho11,rho12_re,rho12_im,purity,trace_err";
pub const KERNEL_HEADER: &str = "t,kernel_closed,kernel_quadrature,abs_err";

/// CSV text plus an optional failure that still lets the text be written.
pub struct RunOutput {
    pub csv: String,
    pub failure: Option<String>,
    pub warnings: Vec<String>,
}

fn num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn trajectory(cfg: &RunConfig, mode: Mode) -> Result<Trajectory, Error> {
    let p = &cfg.params;
    let rho0 = cfg.initial_state();
    match mode {
        Mode::Analytic => analytic_trajectory(p, &rho0, &time_grid(cfg.t_max, cfg.dt, cfg.stride)?),
        Mode::BornMarkov => {
            let bath = discretize_bath(p, cfg.bath.n_modes, cfg.bath.omega_max, cfg.bath.fock_dim)?;
            let model = HybridModel::dephasing(p, &bath, rho0)?;
            integrate_master_with(&model, cfg.t_max, &MasterOptions::new(cfg.dt).with_stride(cfg.stride))
        }
        Mode::Full => {
            let bath = discretize_bath(p, cfg.bath.n_modes, cfg.bath.omega_max, cfg.bath.fock_dim)?;
            let model = FullModel::new(*p, bath, rho0)?;
            evolve_full_with(&model, cfg.t_max, &OracleOptions::new(cfg.dt).with_stride(cfg.stride))
        }
        Mode::Kernel | Mode::Compare => unreachable!("not a trajectory mode"),
    }
}

fn render_trajectory(traj: &Trajectory, out: &mut String) {
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (t, s) in traj.times().iter().zip(traj.states()) {
        let trace_err = (s.trace() - C64::new(1.0, 0.0)).norm();
        let rho12 = s[(0, 1)];
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(*t),
            num(s[(0, 0)].re),
            num(rho12.re),
            num(rho12.im),
            num(purity(s)),
            num(trace_err)
        );
    }
}

/// Hermiticity and trace violations fail the run; negative eigenvalues
/// are reported only.
fn check_monitor(name: &str, traj: &Trajectory, warnings: &mut Vec<String>) -> Option<String> {
    let tol = Tolerances::INTEGRATED;
    for (label, m) in [("reduced", Some(&traj.monitor)), ("joint", traj.joint_monitor.as_ref())] {
        let Some(m) = m else { continue };
        if m.max_hermiticity > tol.hermitian || m.max_trace_error > tol.trace {
            return Some(format!(
                "{name}: {label} state left tolerance (hermiticity {:.3e}, trace error {:.3e})",
                m.max_hermiticity, m.max_trace_error
            ));
        }
        if m.min_eigenvalue < tol.min_eigenvalue {
            warnings.push(format!(
                "{name}: {label} state has eigenvalue {:.3e} below {:.1e}",
                m.min_eigenvalue, tol.min_eigenvalue
            ));
        }
    }
    None
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput, Error> {
    let mut csv = String::new();
    let mut warnings = Vec::new();
    let failure = match cfg.mode {
        Mode::Kernel => {
            csv.push_str(KERNEL_HEADER);
            csv.push('\n');
            for t in time_grid(cfg.t_max, cfg.dt, cfg.stride)? {
                let closed = ohmic_kernel(&cfg.params, t);
                let numeric = ohmic_kernel_quadrature(cfg.params.cutoff, t);
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    num(t),
                    num(closed),
                    num(numeric),
                    num((closed - numeric).abs())
                );
            }
            None
        }
        Mode::Compare => {
            let (ma, mb) = cfg.compare;
            let a = trajectory(cfg, ma)?;
            let b = trajectory(cfg, mb)?;
            let report = compare(&a, &b)?;
            render_trajectory(&a, &mut csv);
            let _ = writeln!(csv, "# compare_a={}", ma.name());
            let _ = writeln!(csv, "# compare_b={}", mb.name());
            let _ = writeln!(csv, "# max_dev={}", num(report.max_dev));
            let _ = writeln!(csv, "# max_rho12_dev={}", num(report.entry_max(0, 1)));
            let _ = writeln!(
                csv,
                "# max_coherence_rel={}",
                num(report.max_coherence_rel_in(0.0, cfg.t_max))
            );
            check_monitor(ma.name(), &a, &mut warnings)
                .or_else(|| check_monitor(mb.name(), &b, &mut warnings))
                .or_else(|| match cfg.tolerance {
                    Some(tol) if !(report.max_dev <= tol) => Some(format!(
                        "compare: max_dev {:.3e} exceeds tolerance {tol:.3e}",
                        report.max_dev
                    )),
                    _ => None,
                })
        }
        mode => {
            let traj = trajectory(cfg, mode)?;
            render_trajectory(&traj, &mut csv);
            check_monitor(mode.name(), &traj, &mut warnings)
        }
    };
    Ok(RunOutput {
        csv,
        failure,
        warnings,
    })
}
