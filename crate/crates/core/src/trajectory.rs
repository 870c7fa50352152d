//! Time series of reduced states produced by the engines.

use crate::density::{purity, StateDiagnostics};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::tolerance::Tolerances;

/// Worst-case structural diagnostics observed along a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Monitor {
    pub max_hermiticity: f64,
    pub max_trace_error: f64,
    /// `+inf` until an eigenvalue check has been made.
    pub min_eigenvalue: f64,
    pub checks: usize,
}

impl Default for Monitor {
    fn default() -> Self {
        Self {
            max_hermiticity: 0.0,
            max_trace_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            checks: 0,
        }
    }
}

impl Monitor {
    pub fn record(&mut self, d: &StateDiagnostics) {
        self.max_hermiticity = self.max_hermiticity.max(d.hermiticity);
        self.max_trace_error = self.max_trace_error.max(d.trace_error);
        if !d.min_eigenvalue.is_nan() {
            self.min_eigenvalue = self.min_eigenvalue.min(d.min_eigenvalue);
        }
        self.checks += 1;
    }

    pub fn merge(&mut self, other: &Monitor) {
        self.max_hermiticity = self.max_hermiticity.max(other.max_hermiticity);
        self.max_trace_error = self.max_trace_error.max(other.max_trace_error);
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
        self.checks += other.checks;
    }

    pub fn within(&self, tol: &Tolerances) -> bool {
        self.max_hermiticity <= tol.hermitian
            && self.max_trace_error <= tol.trace
            && (self.min_eigenvalue.is_infinite() || self.min_eigenvalue >= tol.min_eigenvalue)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<ComplexMatrix>,
    /// Diagnostics of the reduced states.
    pub monitor: Monitor,
    /// Diagnostics of the full state the reduced states came from, when the
    /// engine evolved one.
    pub joint_monitor: Option<Monitor>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            monitor: Monitor::default(),
            joint_monitor: None,
        }
    }

    /// Appends a snapshot; times must strictly increase and shapes agree.
    pub fn push(&mut self, t: f64, state: ComplexMatrix) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::GridMismatch(format!(
                    "time {t} does not follow {last}"
                )));
            }
        }
        if let Some(first) = self.states.first() {
            first.require_shape(&state, "Trajectory::push")?;
        }
        self.monitor.record(&StateDiagnostics::of(&state)?);
        self.times.push(t);
        self.states.push(state);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[ComplexMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &ComplexMatrix)> {
        self.times.last().copied().zip(self.states.last())
    }

    /// Entry `(i, j)` of every snapshot.
    pub fn entry(&self, i: usize, j: usize) -> Vec<C64> {
        self.states.iter().map(|s| s[(i, j)]).collect()
    }

    /// `|ρ_12(t)|` series for a qubit trajectory.
    pub fn coherence_abs(&self) -> Vec<f64> {
        self.entry(0, 1).iter().map(|z| z.norm()).collect()
    }

    pub fn purities(&self) -> Vec<f64> {
        self.states.iter().map(purity).collect()
    }
}

impl Default for Trajectory {
    fn default() -> Self {
        Self::new()
    }
}
