//! Cost evaluation, finite-difference gradients, Adam and the adiabatically
//! assisted outer loop.

mod objective;
mod optimize;

pub use objective::{cost, cost_from, gradient, CircuitObjective, Evaluable, Objective};
pub use optimize::{aavqe, adam_minimize, AdamResult};

use serde::{Deserialize, Serialize};

use crate::hamiltonians::ModelSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub max_iters: usize,
    /// Stop once `|C_k - C_{k-1}|` falls below this.
    pub cost_tol: f64,
    pub grad_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.005,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            max_iters: 1000,
            cost_tol: 1e-10,
            grad_step: 1e-5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{v} must be positive")))
            }
        };
        pos("learning_rate", self.learning_rate)?;
        pos("cost_tol", self.cost_tol)?;
        pos("grad_step", self.grad_step)?;
        pos("eps", self.eps)?;
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::invalid(name, format!("{b} outside [0, 1)")));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

/// Interpolation schedule `s_start, s_start + delta_s, ..., s_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Schedule {
    pub s_start: f64,
    pub s_end: f64,
    /// Defaults to `1/(5N)`.
    pub delta_s: Option<f64>,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            s_start: 0.1,
            s_end: 1.0,
            delta_s: None,
        }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.s_start && self.s_start <= self.s_end && self.s_end <= 1.0) {
            return Err(Error::invalid(
                "schedule",
                format!(
                    "need 0 <= s_start ({}) <= s_end ({}) <= 1",
                    self.s_start, self.s_end
                ),
            ));
        }
        if let Some(d) = self.delta_s {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::invalid("delta_s", format!("{d} must be positive")));
            }
        }
        Ok(())
    }

    /// The `s` values visited for an `n`-qubit problem; the last one is exactly `s_end`.
    pub fn points(&self, n: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let ds = self.delta_s.unwrap_or(1.0 / (5.0 * n as f64));
        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let s = self.s_start + k as f64 * ds;
            // Snap values within roundoff of the end onto it.
            if s >= self.s_end - 1e-12 {
                break;
            }
            out.push(s);
            k += 1;
        }
        out.push(self.s_end);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub s: f64,
    pub start_params: Vec<f64>,
    pub params: Vec<f64>,
    /// Lowest energy seen during the step.
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub energy: f64,
    pub e_gs: f64,
    pub e_max: f64,
    pub infidelity: f64,
    pub residual_energy: f64,
    pub ground_degeneracy: usize,
    /// Residual energy fell outside `[0, 1]` by more than 1e-9 before clipping.
    pub residual_clipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub s: f64,
    pub message: String,
}

/// Outcome of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub ansatz: String,
    pub depth: usize,
    pub n_qubits: usize,
    pub model: Option<ModelSpec>,
    pub seed: u64,
    pub config_hash: Option<String>,
    pub initial_params: Vec<f64>,
    pub steps: Vec<StepRecord>,
    pub metrics: Option<Metrics>,
    pub failed: Option<Failure>,
    pub wall_time_s: f64,
}

impl RunRecord {
    pub fn final_step(&self) -> Option<&StepRecord> {
        self.steps.last()
    }

    pub fn final_params(&self) -> Option<&[f64]> {
        self.steps.last().map(|s| s.params.as_slice())
    }

    pub fn final_energy(&self) -> Option<f64> {
        self.steps.last().map(|s| s.energy)
    }

    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        let mut a = self.clone();
        a.wall_time_s = other.wall_time_s;
        &a == other
    }
}
