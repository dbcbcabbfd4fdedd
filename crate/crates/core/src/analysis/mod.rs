//! Infidelities, residual energies, minimum-depth sweeps and the entanglement
//! spectrum diagnostic.

mod entanglement;
mod sweep;

pub use entanglement::{entanglement_spectrum, ks_distance, mp_cdf, EntanglementSpectrum};
pub use sweep::{min_depth_sweep, DepthResult, SweepResult};

use serde::{Deserialize, Serialize};

use crate::ansatz::{apply_circuit, Circuit};
use crate::engine::{DensityMatrix, PauliOperator, StateVector};
use crate::hamiltonians::{ground_space, max_eigenvalue};
use crate::vqe::{Metrics, RunRecord};
use crate::{Error, Result};

/// Allowed deviation of the ground basis Gram matrix from the identity.
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// Overshoot beyond `[0, 1]` tolerated before a residual energy is flagged as clipped.
pub const CLIP_TOL: f64 = 1e-9;

fn check_basis(basis: &[StateVector], n: usize) -> Result<()> {
    if basis.is_empty() {
        return Err(Error::invalid("gs_basis", "empty"));
    }
    for (i, a) in basis.iter().enumerate() {
        if a.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.n_qubits(),
            });
        }
        for (j, b) in basis.iter().enumerate().skip(i) {
            let g = a.inner(b)?;
            let want = if i == j { 1.0 } else { 0.0 };
            if (g.re - want).abs() > ORTHONORMAL_TOL || g.im.abs() > ORTHONORMAL_TOL {
                return Err(Error::invalid(
                    "gs_basis",
                    format!("not orthonormal: <{i}|{j}> = {g}"),
                ));
            }
        }
    }
    Ok(())
}

/// `1 - ||P psi||` with `P` the projector onto the span of `gs_basis`.
pub fn infidelity(state: &StateVector, gs_basis: &[StateVector]) -> Result<f64> {
    check_basis(gs_basis, state.n_qubits())?;
    let mut w = 0.0;
    for b in gs_basis {
        w += b.inner(state)?.norm_sqr();
    }
    Ok((1.0 - w.sqrt()).clamp(0.0, 1.0))
}

/// `1 - sqrt(tr(P rho))`, the Uhlmann fidelity to the ground subspace.
pub fn mixed_infidelity(rho: &DensityMatrix, gs_basis: &[StateVector]) -> Result<f64> {
    check_basis(gs_basis, rho.n_qubits())?;
    let mut w = 0.0;
    for b in gs_basis {
        w += rho.population(b)?;
    }
    Ok((1.0 - w.max(0.0).sqrt()).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualEnergy {
    pub value: f64,
    pub clipped: bool,
}

/// `(e - E_GS) / (E_max - E_GS)` clipped to `[0, 1]`.
pub fn residual_energy(e: f64, e_gs: f64, e_max: f64) -> Result<ResidualEnergy> {
    if !(e_max > e_gs) {
        return Err(Error::invalid(
            "spectrum",
            format!("E_max ({e_max}) must exceed E_GS ({e_gs})"),
        ));
    }
    let raw = (e - e_gs) / (e_max - e_gs);
    let value = raw.clamp(0.0, 1.0);
    Ok(ResidualEnergy {
        value,
        clipped: (raw - value).abs() > CLIP_TOL,
    })
}

/// Exact data of a target Hamiltonian needed to score variational states.
#[derive(Debug, Clone)]
pub struct GroundReference {
    pub e_gs: f64,
    pub e_max: f64,
    pub basis: Vec<StateVector>,
}

impl GroundReference {
    pub fn new(h: &PauliOperator) -> Result<Self> {
        let spec = ground_space(h, 1)?;
        Ok(Self {
            e_gs: spec.ground_energy(),
            e_max: max_eigenvalue(h)?,
            basis: spec.ground_states().to_vec(),
        })
    }

    pub fn degeneracy(&self) -> usize {
        self.basis.len()
    }

    fn metrics(&self, energy: f64, infidelity: f64) -> Result<Metrics> {
        let r = residual_energy(energy, self.e_gs, self.e_max)?;
        Ok(Metrics {
            energy,
            e_gs: self.e_gs,
            e_max: self.e_max,
            infidelity,
            residual_energy: r.value,
            ground_degeneracy: self.degeneracy(),
            residual_clipped: r.clipped,
        })
    }

    pub fn pure_metrics(&self, state: &StateVector, energy: f64) -> Result<Metrics> {
        self.metrics(energy, infidelity(state, &self.basis)?)
    }

    pub fn mixed_metrics(&self, rho: &DensityMatrix, energy: f64) -> Result<Metrics> {
        self.metrics(energy, mixed_infidelity(rho, &self.basis)?)
    }

    /// Score the final parameters of a noiseless record and store the metrics on it.
    pub fn score_record(&self, record: &mut RunRecord, circuit: &Circuit) -> Result<()> {
        let (Some(p), Some(e)) = (record.final_params(), record.final_energy()) else {
            return Ok(());
        };
        let psi = apply_circuit(circuit, p, &circuit.initial()?)?;
        record.metrics = Some(self.pure_metrics(&psi, e)?);
        Ok(())
    }
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub ansatz: String,
    pub n_qubits: usize,
    pub depth: usize,
    pub seed: u64,
    pub energy: f64,
    pub infidelity: f64,
    pub residual_energy: f64,
    pub residual_clipped: bool,
    pub ground_degeneracy: usize,
}

impl MetricReport {
    /// `None` for unscored or failed records.
    pub fn from_record(r: &RunRecord) -> Option<Self> {
        let m = r.metrics.as_ref()?;
        if r.failed.is_some() {
            return None;
        }
        Some(Self {
            ansatz: r.ansatz.clone(),
            n_qubits: r.n_qubits,
            depth: r.depth,
            seed: r.seed,
            energy: m.energy,
            infidelity: m.infidelity,
            residual_energy: m.residual_energy,
            residual_clipped: m.residual_clipped,
            ground_degeneracy: m.ground_degeneracy,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_energy_flags_overshoot() {
        let r = residual_energy(-1.5, -1.0, 1.0).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.clipped);
        let r = residual_energy(-1.0 - 1e-12, -1.0, 1.0).unwrap();
        assert!(!r.clipped);
        assert!(residual_energy(0.0, 1.0, 1.0).is_err());
    }
}
