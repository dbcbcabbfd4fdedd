use super::{Circuit, Coupling, Gate, GateKind};
use crate::engine::gates::{rx, ry};
use crate::engine::{DensityMatrix, PauliOperator, PauliString, StateVector};
use crate::hamiltonians::{flip_flop_pairs, ising_pairs};
use crate::{Error, Result};

/// Krylov accuracy for wQED-XX gates. Tight enough that finite-difference
/// gradients with step 1e-5 are not dominated by exponential error.
pub const CIRCUIT_EXPM_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Something a circuit can act on.
pub trait Backend {
    fn n_qubits(&self) -> usize;
    fn rotate(&mut self, qubit: usize, axis: Axis, theta: f64) -> Result<()>;
    fn cz(&mut self, a: usize, b: usize) -> Result<()>;
    fn xx(&mut self, a: usize, b: usize, phi: f64) -> Result<()>;
    fn pauli_rotation(&mut self, p: &PauliString, phi: f64) -> Result<()>;
    fn evolve(&mut self, h: &PauliOperator, t: f64) -> Result<()>;
    /// `exp(-i t sum_{i<j} (w_{j-i}/2)(X_i X_j + Y_i Y_j))`, by default through [`Backend::evolve`].
    fn flip_flop(&mut self, w: &[f64], t: f64) -> Result<()> {
        let n = self.n_qubits();
        let h = PauliOperator::new(n, flip_flop_pairs(n, |r| w[r - 1]))?;
        self.evolve(&h, t)
    }
    /// Called after every gate; noise models hook in here.
    fn gate_done(&mut self, _gate: &Gate) -> Result<()> {
        Ok(())
    }
}

impl Backend for StateVector {
    fn n_qubits(&self) -> usize {
        StateVector::n_qubits(self)
    }
    fn rotate(&mut self, qubit: usize, axis: Axis, theta: f64) -> Result<()> {
        match axis {
            Axis::X => self.apply_single_qubit(qubit, &rx(theta)),
            Axis::Y => self.apply_single_qubit(qubit, &ry(theta)),
            Axis::Z => self.apply_rz(qubit, theta),
        }
    }
    fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.apply_cz(a, b)
    }
    fn xx(&mut self, a: usize, b: usize, phi: f64) -> Result<()> {
        self.apply_xx_rotation(a, b, phi)
    }
    fn pauli_rotation(&mut self, p: &PauliString, phi: f64) -> Result<()> {
        self.apply_pauli_rotation(p, phi)
    }
    fn evolve(&mut self, h: &PauliOperator, t: f64) -> Result<()> {
        self.expm_apply(h, t, CIRCUIT_EXPM_TOL).map(|_| ())
    }
    fn flip_flop(&mut self, w: &[f64], t: f64) -> Result<()> {
        self.apply_flip_flop(w, t)
    }
}

impl Backend for DensityMatrix {
    fn n_qubits(&self) -> usize {
        DensityMatrix::n_qubits(self)
    }
    fn rotate(&mut self, qubit: usize, axis: Axis, theta: f64) -> Result<()> {
        match axis {
            Axis::X => self.apply_single_qubit(qubit, &rx(theta)),
            Axis::Y => self.apply_single_qubit(qubit, &ry(theta)),
            Axis::Z => self.apply_rz(qubit, theta),
        }
    }
    fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.apply_cz(a, b)
    }
    fn xx(&mut self, a: usize, b: usize, phi: f64) -> Result<()> {
        self.apply_xx_rotation(a, b, phi)
    }
    fn pauli_rotation(&mut self, p: &PauliString, phi: f64) -> Result<()> {
        self.apply_pauli_rotation(p, phi)
    }
    fn evolve(&mut self, h: &PauliOperator, t: f64) -> Result<()> {
        self.expm_apply(h, t, CIRCUIT_EXPM_TOL).map(|_| ())
    }
}

/// `(T, L)` of a wQED gate from already clamped parameters.
fn time_and_range(gate: &Gate, coupling: &Coupling, params: &[f64]) -> (f64, f64) {
    let t = params[gate.slots[0]];
    let l = if coupling.has_range() {
        params[gate.slots[1]]
    } else {
        f64::INFINITY
    };
    (t, l)
}

/// Generator `H` with `gate = exp(-i T H)` for wQED gates, `exp(-i theta H)` for
/// HVA terms; `None` for the other kinds.
pub fn gate_generator(n: usize, gate: &Gate, params: &[f64]) -> Result<Option<PauliOperator>> {
    Ok(match &gate.kind {
        GateKind::WqedXx { coupling } => {
            let (_, l) = time_and_range(gate, coupling, params);
            Some(PauliOperator::new(
                n,
                flip_flop_pairs(n, |r| coupling.weight(r, l)),
            )?)
        }
        GateKind::WqedI { coupling } => {
            let (_, l) = time_and_range(gate, coupling, params);
            Some(PauliOperator::new(
                n,
                ising_pairs(n, |r| 2.0 * coupling.weight(r, l)),
            )?)
        }
        GateKind::HvaTerm { generator } => Some(generator.clone()),
        _ => None,
    })
}

fn apply_gate<B: Backend + ?Sized>(b: &mut B, gate: &Gate, params: &[f64]) -> Result<()> {
    let n = b.n_qubits();
    let q = &gate.qubits;
    match &gate.kind {
        GateKind::RotX => b.rotate(q[0], Axis::X, params[gate.slots[0]])?,
        GateKind::RotY => b.rotate(q[0], Axis::Y, params[gate.slots[0]])?,
        GateKind::RotZ => b.rotate(q[0], Axis::Z, params[gate.slots[0]])?,
        GateKind::GlobalRotZ => {
            let theta = params[gate.slots[0]];
            for &k in q {
                b.rotate(k, Axis::Z, theta)?;
            }
        }
        GateKind::Cz => b.cz(q[0], q[1])?,
        GateKind::PairXx { weight } => b.xx(q[0], q[1], weight * params[gate.slots[0]])?,
        GateKind::WqedI { coupling } => {
            let (t, l) = time_and_range(gate, coupling, params);
            // Commuting factorization: exp(-i T H_I) = prod exp(-i 2 T w(r) X_i X_j).
            for (a, &i) in q.iter().enumerate() {
                for &j in &q[a + 1..] {
                    let phi = 2.0 * t * coupling.weight(j.abs_diff(i), l);
                    if phi != 0.0 {
                        b.xx(i, j, phi)?;
                    }
                }
            }
        }
        GateKind::WqedXx { coupling } => {
            let (t, l) = time_and_range(gate, coupling, params);
            let w: Vec<f64> = (1..n).map(|r| coupling.weight(r, l)).collect();
            b.flip_flop(&w, t)?;
        }
        GateKind::HvaTerm { generator } => {
            let theta = params[gate.slots[0]];
            for (c, p) in generator.terms() {
                b.pauli_rotation(p, c * theta)?;
            }
        }
    }
    b.gate_done(gate)
}

/// Apply gates `range` of the circuit with unclamped `params`.
pub fn apply_gates<B: Backend + ?Sized>(
    circuit: &Circuit,
    params: &[f64],
    backend: &mut B,
    range: std::ops::Range<usize>,
) -> Result<()> {
    circuit.check_params(params)?;
    if backend.n_qubits() != circuit.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits,
            got: backend.n_qubits(),
        });
    }
    let p = circuit.clamp(params);
    for gate in &circuit.gates[range] {
        apply_gate(backend, gate, &p)?;
    }
    Ok(())
}

/// Run the whole circuit on a copy of `state`.
pub fn apply_circuit(
    circuit: &Circuit,
    params: &[f64],
    state: &StateVector,
) -> Result<StateVector> {
    let mut s = state.clone();
    apply_gates(circuit, params, &mut s, 0..circuit.gates.len())?;
    Ok(s)
}
