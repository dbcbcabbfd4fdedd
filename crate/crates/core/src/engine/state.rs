use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::gates::{self, Mat2, Mat4};
use super::krylov;
use super::pauli::{bit_of, PauliOperator, PauliString, MAX_QUBITS};
use crate::{Error, Result};

/// Tolerance on `U^dagger U = I` for caller-supplied gate matrices.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Pure state of `n` qubits; `amplitudes.len() == 2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::invalid("index", format!("{index} >= {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Basis state from per-qubit bits, qubit 0 first.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let n = bits.len();
        let idx = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        Self::basis(n, idx)
    }

    /// Wrap raw amplitudes; the length must be a power of two and the norm 1 within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1usize << n || n == 0 {
            return Err(Error::invalid(
                "amplitudes",
                format!("length {} is not a power of two >= 2", amps.len()),
            ));
        }
        let s = Self { n_qubits: n, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("amplitudes", format!("norm {norm} != 1")));
        }
        Ok(s)
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("amplitudes", "zero or non-finite norm"));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amps)
    }

    /// Tensor product of single-qubit states, qubit 0 first.
    pub fn product(qubit_states: &[[Complex64; 2]]) -> Result<Self> {
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for q in qubit_states {
            amps = amps.iter().flat_map(|&a| [a * q[0], a * q[1]]).collect();
        }
        Self::normalized(amps)
    }

    /// Haar-random state from complex Gaussian amplitudes.
    pub fn haar_random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_register(n_qubits)?;
        let amps = (0..1usize << n_qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same(other.n_qubits)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|`
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    fn check_same(&self, n: usize) -> Result<()> {
        if self.n_qubits != n {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: n,
            });
        }
        Ok(())
    }

    pub(crate) fn bit(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(bit_of(self.n_qubits, qubit))
    }

    pub(crate) fn pair_bits(&self, q1: usize, q2: usize) -> Result<(usize, usize)> {
        let b1 = self.bit(q1)?;
        let b2 = self.bit(q2)?;
        if q1 == q2 {
            return Err(Error::RepeatedQubit(q1));
        }
        Ok((b1, b2))
    }

    /// Apply a 2x2 unitary on `qubit`.
    pub fn apply_single_qubit(&mut self, qubit: usize, u: &Mat2) -> Result<()> {
        let bit = self.bit(qubit)?;
        gates::check_unitary(u, UNITARITY_TOL)?;
        gates::apply_mat2(&mut self.amps, bit, u, false);
        Ok(())
    }

    /// Apply a 4x4 unitary on `(q1, q2)`, local basis `|b(q1) b(q2)>`.
    pub fn apply_two_qubit(&mut self, q1: usize, q2: usize, u: &Mat4) -> Result<()> {
        let (b1, b2) = self.pair_bits(q1, q2)?;
        gates::check_unitary(u, UNITARITY_TOL)?;
        gates::apply_mat4(&mut self.amps, b1, b2, u, false);
        Ok(())
    }

    /// `exp(-i theta Z)` on one qubit.
    pub fn apply_rz(&mut self, qubit: usize, theta: f64) -> Result<()> {
        let bit = self.bit(qubit)?;
        gates::apply_diag2(
            &mut self.amps,
            bit,
            Complex64::from_polar(1.0, -theta),
            Complex64::from_polar(1.0, theta),
        );
        Ok(())
    }

    pub fn apply_cz(&mut self, q1: usize, q2: usize) -> Result<()> {
        let (b1, b2) = self.pair_bits(q1, q2)?;
        gates::apply_cz(&mut self.amps, b1, b2);
        Ok(())
    }

    /// `exp(-i phi X_q1 X_q2)`
    pub fn apply_xx_rotation(&mut self, q1: usize, q2: usize, phi: f64) -> Result<()> {
        let (b1, b2) = self.pair_bits(q1, q2)?;
        gates::apply_xx_rotation(&mut self.amps, b1 | b2, phi, false);
        Ok(())
    }

    /// `exp(-i phi P)` for a Pauli string.
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, phi: f64) -> Result<()> {
        self.check_string(p)?;
        gates::apply_pauli_rotation(&mut self.amps, p, phi, false);
        Ok(())
    }

    fn check_string(&self, p: &PauliString) -> Result<()> {
        if p.support() >> self.n_qubits != 0 {
            return Err(Error::invalid("pauli", "string wider than register"));
        }
        Ok(())
    }

    /// `exp(-i t H) |self>` by Krylov projection, to L2 accuracy `tol`.
    pub fn expm_apply(&mut self, h: &PauliOperator, t: f64, tol: f64) -> Result<krylov::ExpmStats> {
        self.check_same(h.n_qubits())?;
        krylov::expm_apply(h, &mut self.amps, t, tol)
    }

    /// `<psi|H|psi>`; the imaginary part is roundoff for a Hermitian `H`.
    /// `exp(-i t sum_{i<j} (w_{j-i}/2)(X_i X_j + Y_i Y_j))` by exact block
    /// diagonalization; `w[r - 1]` is the weight at distance `r`.
    pub fn apply_flip_flop(&mut self, w: &[f64], t: f64) -> Result<()> {
        super::flipflop::apply(&mut self.amps, self.n_qubits, w, t)
    }

    pub fn expectation(&self, h: &PauliOperator) -> Result<f64> {
        self.check_same(h.n_qubits())?;
        let v = h.expectation_raw(&self.amps);
        debug_assert!(
            v.im.abs() <= 1e-10 * (1.0 + h.one_norm()),
            "imaginary expectation {}",
            v.im
        );
        Ok(v.re)
    }

    /// `H |psi>` (not normalized).
    pub fn apply_operator(&self, h: &PauliOperator) -> Result<Vec<Complex64>> {
        self.check_same(h.n_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        h.apply_to(&self.amps, &mut out);
        Ok(out)
    }

    /// Multiply by a global phase; used to compare states up to phase in tests.
    pub fn with_global_phase(mut self, phase: f64) -> Self {
        let f = Complex64::from_polar(1.0, phase);
        self.amps.iter_mut().for_each(|a| *a *= f);
        self
    }
}

pub(crate) fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::invalid(
            "n_qubits",
            format!("{n_qubits} outside 1..={MAX_QUBITS}"),
        ));
    }
    Ok(())
}
