//! Amplitude damping followed by dephasing after every gate, evaluated on dense
//! density matrices, and the warm-started noisy VQE.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ansatz::{apply_gates, Axis, Backend, Circuit, Gate};
use crate::engine::density::MAX_DENSITY_QUBITS;
use crate::engine::gates::Mat2;
use crate::engine::{DensityMatrix, KrausChannel, PauliOperator, PauliString, StateVector};
use crate::vqe::{
    adam_minimize, CircuitObjective, Evaluable, OptimizerConfig, RunRecord, StepRecord,
};
use crate::{Error, Result};

/// Default cap on noisy simulations; [`NoisyState::with_limit`] lifts it.
pub const MAX_NOISY_QUBITS: usize = 10;

/// Per-gate error probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
}

impl NoiseModel {
    pub const NONE: NoiseModel = NoiseModel { p1: 0.0, p2: 0.0 };
    pub const LOW: NoiseModel = NoiseModel { p1: 1e-5, p2: 5e-4 };
    pub const HIGH: NoiseModel = NoiseModel { p1: 1e-4, p2: 5e-3 };

    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let m = NoiseModel { p1, p2 };
        m.validate()?;
        Ok(m)
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "none" => Ok(Self::NONE),
            "low" => Ok(Self::LOW),
            "high" => Ok(Self::HIGH),
            _ => Err(Error::Config(format!(
                "unknown noise preset {name:?} (expected low, high or none)"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_p(self.p1)?;
        check_p(self.p2)
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid("p", format!("{p} outside [0, 1]")))
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `{[[1,0],[0,sqrt(1-p)]], [[0,sqrt p],[0,0]]}`
pub fn damping_kraus(p: f64) -> Result<[Mat2; 2]> {
    check_p(p)?;
    Ok([
        [[c(1.0), c(0.0)], [c(0.0), c((1.0 - p).sqrt())]],
        [[c(0.0), c(p.sqrt())], [c(0.0), c(0.0)]],
    ])
}

/// Phase damping `{diag(1, sqrt(1-p)), diag(0, sqrt p)}`.
pub fn dephasing_kraus(p: f64) -> Result<[Mat2; 2]> {
    check_p(p)?;
    Ok([
        [[c(1.0), c(0.0)], [c(0.0), c((1.0 - p).sqrt())]],
        [[c(0.0), c(0.0)], [c(0.0), c(p.sqrt())]],
    ])
}

#[derive(Debug, Clone)]
struct ChannelPair {
    damping: KrausChannel,
    dephasing: KrausChannel,
}

impl ChannelPair {
    fn new(p: f64) -> Result<Self> {
        Ok(Self {
            damping: KrausChannel::new(&damping_kraus(p)?)?,
            dephasing: KrausChannel::new(&dephasing_kraus(p)?)?,
        })
    }
}

/// A density matrix that picks up gate errors as the circuit runs.
#[derive(Debug, Clone)]
pub struct NoisyState {
    rho: DensityMatrix,
    noise: NoiseModel,
    single: ChannelPair,
    multi: ChannelPair,
    kraus_applications: usize,
}

impl NoisyState {
    pub fn new(rho: DensityMatrix, noise: NoiseModel) -> Result<Self> {
        Self::with_limit(rho, noise, MAX_NOISY_QUBITS)
    }

    /// Allow up to `max_qubits` (at most the density-matrix limit).
    pub fn with_limit(rho: DensityMatrix, noise: NoiseModel, max_qubits: usize) -> Result<Self> {
        noise.validate()?;
        let limit = max_qubits.min(MAX_DENSITY_QUBITS);
        if rho.n_qubits() > limit {
            return Err(Error::invalid(
                "n",
                format!(
                    "{} qubits exceeds the noisy-simulation limit {limit}",
                    rho.n_qubits()
                ),
            ));
        }
        Ok(Self {
            rho,
            noise,
            single: ChannelPair::new(noise.p1)?,
            multi: ChannelPair::new(noise.p2)?,
            kraus_applications: 0,
        })
    }

    pub fn from_pure(psi: &StateVector, noise: NoiseModel) -> Result<Self> {
        Self::new(DensityMatrix::from_pure(psi)?, noise)
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn into_rho(self) -> DensityMatrix {
        self.rho
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    /// Single-qubit channel applications so far (damping and dephasing count separately).
    pub fn kraus_applications(&self) -> usize {
        self.kraus_applications
    }
}

impl Backend for NoisyState {
    fn n_qubits(&self) -> usize {
        self.rho.n_qubits()
    }
    fn rotate(&mut self, qubit: usize, axis: Axis, theta: f64) -> Result<()> {
        self.rho.rotate(qubit, axis, theta)
    }
    fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.rho.apply_cz(a, b)
    }
    fn xx(&mut self, a: usize, b: usize, phi: f64) -> Result<()> {
        self.rho.apply_xx_rotation(a, b, phi)
    }
    fn pauli_rotation(&mut self, p: &PauliString, phi: f64) -> Result<()> {
        self.rho.apply_pauli_rotation(p, phi)
    }
    fn evolve(&mut self, h: &PauliOperator, t: f64) -> Result<()> {
        Backend::evolve(&mut self.rho, h, t)
    }
    fn gate_done(&mut self, gate: &Gate) -> Result<()> {
        let pair = if gate.is_multi_qubit() {
            &self.multi
        } else {
            &self.single
        };
        for &q in &gate.qubits {
            self.rho.apply_channel(q, &pair.damping)?;
            self.rho.apply_channel(q, &pair.dephasing)?;
            self.kraus_applications += 2;
        }
        Ok(())
    }
}

impl Evaluable for NoisyState {
    fn energy(&self, h: &PauliOperator) -> Result<f64> {
        self.rho.expectation(h)
    }
}

impl Evaluable for DensityMatrix {
    fn energy(&self, h: &PauliOperator) -> Result<f64> {
        self.expectation(h)
    }
}

/// Run the circuit on `initial` with errors after every gate.
pub fn noisy_apply_circuit(
    circuit: &Circuit,
    params: &[f64],
    noise: NoiseModel,
    initial: &DensityMatrix,
) -> Result<NoisyState> {
    noisy_apply_circuit_with_limit(circuit, params, noise, initial, MAX_NOISY_QUBITS)
}

/// [`noisy_apply_circuit`] with a different qubit cap.
pub fn noisy_apply_circuit_with_limit(
    circuit: &Circuit,
    params: &[f64],
    noise: NoiseModel,
    initial: &DensityMatrix,
    max_qubits: usize,
) -> Result<NoisyState> {
    let mut s = NoisyState::with_limit(initial.clone(), noise, max_qubits)?;
    apply_gates(circuit, params, &mut s, 0..circuit.gates.len())?;
    Ok(s)
}

/// `tr(H rho(params))` under noise, starting from the circuit's initial state.
pub fn noisy_cost(
    circuit: &Circuit,
    params: &[f64],
    h: &PauliOperator,
    noise: NoiseModel,
) -> Result<f64> {
    let rho = DensityMatrix::from_pure(&circuit.initial()?)?;
    noisy_apply_circuit(circuit, params, noise, &rho)?
        .rho()
        .expectation(h)
}

/// One Adam minimization of the noisy energy at the target, warm-started from
/// the final parameters of a completed noiseless run.
///
/// The returned record has a single step at the noiseless run's final `s`; metrics are left for the
/// caller since they need the exact ground space.
pub fn noisy_vqe(
    htarget: &PauliOperator,
    circuit: &Circuit,
    noiseless: &RunRecord,
    noise: NoiseModel,
    cfg: &OptimizerConfig,
) -> Result<RunRecord> {
    noisy_vqe_with_limit(htarget, circuit, noiseless, noise, cfg, MAX_NOISY_QUBITS)
}

/// [`noisy_vqe`] with a different qubit cap.
pub fn noisy_vqe_with_limit(
    htarget: &PauliOperator,
    circuit: &Circuit,
    noiseless: &RunRecord,
    noise: NoiseModel,
    cfg: &OptimizerConfig,
    max_qubits: usize,
) -> Result<RunRecord> {
    if noiseless.failed.is_some() {
        return Err(Error::invalid("noiseless_record", "run did not complete"));
    }
    let start_params = noiseless
        .final_params()
        .ok_or_else(|| Error::invalid("noiseless_record", "run has no steps"))?
        .to_vec();
    let start = Instant::now();
    let initial = NoisyState::with_limit(
        DensityMatrix::from_pure(&circuit.initial()?)?,
        noise,
        max_qubits,
    )?;
    let obj = CircuitObjective::new(circuit, htarget, initial);
    let res = adam_minimize(&obj, &start_params, cfg)?;
    Ok(RunRecord {
        ansatz: circuit.name.clone(),
        depth: circuit.depth,
        n_qubits: circuit.n_qubits,
        model: noiseless.model.clone(),
        seed: noiseless.seed,
        config_hash: noiseless.config_hash.clone(),
        initial_params: start_params.clone(),
        steps: vec![StepRecord {
            s: noiseless.final_step().map_or(1.0, |st| st.s),
            start_params,
            params: res.params,
            energy: res.energy,
            iterations: res.iterations,
            converged: res.converged,
        }],
        metrics: None,
        failed: None,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
