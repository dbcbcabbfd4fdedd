use num_complex::Complex64;

use super::dense;
use super::gates::{self, Mat2, Mat4};
use super::krylov::{self, ExpmStats};
use super::pauli::{bit_of, PauliOperator, PauliString};
use super::state::{check_register, StateVector, UNITARITY_TOL};
use crate::{Error, Result};

/// Largest register a density matrix may be allocated for.
pub const MAX_DENSITY_QUBITS: usize = 13;

/// Tolerance on `sum_k K_k^dagger K_k = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Mixed state of `n` qubits, stored row-major as a `2^n x 2^n` matrix.
///
/// Internally the matrix is treated as a `2n`-qubit vector: left
/// multiplication acts on the row bits, right multiplication by `U^dagger`
/// acts on the column bits with the conjugated gate.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    elems: Vec<Complex64>,
}

/// A single-qubit channel compiled into its local 4x4 action on 2x2 blocks.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<Mat2>,
    /// Nonzero entries `((i, j), (a, b), weight)` of `sum_k K[i][a] conj(K[j][b])`.
    map: Vec<(usize, usize, usize, usize, Complex64)>,
}

impl KrausChannel {
    pub fn new(kraus: &[Mat2]) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::IncompleteChannel(1.0));
        }
        let defect = completeness_defect(kraus);
        if defect > COMPLETENESS_TOL || !defect.is_finite() {
            return Err(Error::IncompleteChannel(defect));
        }
        let mut map = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let w: Complex64 = kraus.iter().map(|k| k[i][a] * k[j][b].conj()).sum();
                        if w.norm() > 0.0 {
                            map.push((i, j, a, b, w));
                        }
                    }
                }
            }
        }
        Ok(Self {
            kraus: kraus.to_vec(),
            map,
        })
    }

    pub fn kraus(&self) -> &[Mat2] {
        &self.kraus
    }
}

/// Largest entry of `sum_k K_k^dagger K_k - I`.
pub fn completeness_defect(kraus: &[Mat2]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut s: Complex64 = kraus
                .iter()
                .map(|k| k[0][i].conj() * k[0][j] + k[1][i].conj() * k[1][j])
                .sum();
            if i == j {
                s -= 1.0;
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

impl DensityMatrix {
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        let n = state.n_qubits();
        check_density_register(n)?;
        let a = state.amplitudes();
        let dim = a.len();
        let mut elems = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                elems[r * dim + c] = a[r] * a[c].conj();
            }
        }
        Ok(Self { n_qubits: n, elems })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_density_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut elems = vec![Complex64::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            elems[k * dim + k] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n_qubits, elems })
    }

    /// Wrap a row-major matrix; checks shape, Hermiticity and unit trace (1e-10).
    pub fn from_elements(n_qubits: usize, elems: Vec<Complex64>) -> Result<Self> {
        check_density_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if elems.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: elems.len(),
            });
        }
        let dm = Self { n_qubits, elems };
        if dm.hermiticity_defect() > 1e-10 {
            return Err(Error::invalid("elements", "matrix is not Hermitian"));
        }
        if (dm.trace() - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(
                "elements",
                format!("trace {} != 1", dm.trace()),
            ));
        }
        Ok(dm)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn elements(&self) -> &[Complex64] {
        &self.elems
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elems[row * self.dim() + col]
    }

    pub fn trace(&self) -> f64 {
        let dim = self.dim();
        (0..dim).map(|k| self.elems[k * dim + k].re).sum()
    }

    /// `tr(rho^2)`
    pub fn purity(&self) -> f64 {
        // rho is Hermitian, so tr(rho^2) = sum |rho_ij|^2
        self.elems.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                worst =
                    worst.max((self.elems[r * dim + c] - self.elems[c * dim + r].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        dense::hermitian_eigenvalues(&self.elems, self.dim())
    }

    /// `tr(H rho)`
    pub fn expectation(&self, h: &PauliOperator) -> Result<f64> {
        self.check_same(h.n_qubits())?;
        Ok(h.trace_with(&self.elems).re)
    }

    /// `<psi|rho|psi>`
    pub fn population(&self, psi: &StateVector) -> Result<f64> {
        self.check_same(psi.n_qubits())?;
        let a = psi.amplitudes();
        let dim = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..dim {
            if a[r].norm_sqr() == 0.0 {
                continue;
            }
            let row = &self.elems[r * dim..(r + 1) * dim];
            let s: Complex64 = row.iter().zip(a).map(|(x, y)| x * y).sum();
            acc += a[r].conj() * s;
        }
        Ok(acc.re)
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

    fn bits(&self, qubit: usize) -> Result<(usize, usize)> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        let col = bit_of(self.n_qubits, qubit);
        Ok((col << self.n_qubits, col))
    }

    fn pair(&self, q1: usize, q2: usize) -> Result<((usize, usize), (usize, usize))> {
        let a = self.bits(q1)?;
        let b = self.bits(q2)?;
        if q1 == q2 {
            return Err(Error::RepeatedQubit(q1));
        }
        Ok((a, b))
    }

    /// `rho -> U rho U^dagger` for a single-qubit unitary.
    pub fn apply_single_qubit(&mut self, qubit: usize, u: &Mat2) -> Result<()> {
        let (row, col) = self.bits(qubit)?;
        gates::check_unitary(u, UNITARITY_TOL)?;
        gates::apply_mat2(&mut self.elems, row, u, false);
        gates::apply_mat2(&mut self.elems, col, u, true);
        Ok(())
    }

    /// `rho -> U rho U^dagger` for a two-qubit unitary on `(q1, q2)`.
    pub fn apply_two_qubit(&mut self, q1: usize, q2: usize, u: &Mat4) -> Result<()> {
        let ((r1, c1), (r2, c2)) = self.pair(q1, q2)?;
        gates::check_unitary(u, UNITARITY_TOL)?;
        gates::apply_mat4(&mut self.elems, r1, r2, u, false);
        gates::apply_mat4(&mut self.elems, c1, c2, u, true);
        Ok(())
    }

    pub fn apply_rz(&mut self, qubit: usize, theta: f64) -> Result<()> {
        let (row, col) = self.bits(qubit)?;
        let d0 = Complex64::from_polar(1.0, -theta);
        let d1 = Complex64::from_polar(1.0, theta);
        gates::apply_diag2(&mut self.elems, row, d0, d1);
        gates::apply_diag2(&mut self.elems, col, d0.conj(), d1.conj());
        Ok(())
    }

    pub fn apply_cz(&mut self, q1: usize, q2: usize) -> Result<()> {
        let ((r1, c1), (r2, c2)) = self.pair(q1, q2)?;
        gates::apply_cz(&mut self.elems, r1, r2);
        gates::apply_cz(&mut self.elems, c1, c2);
        Ok(())
    }

    pub fn apply_xx_rotation(&mut self, q1: usize, q2: usize, phi: f64) -> Result<()> {
        let ((r1, c1), (r2, c2)) = self.pair(q1, q2)?;
        gates::apply_xx_rotation(&mut self.elems, r1 | r2, phi, false);
        gates::apply_xx_rotation(&mut self.elems, c1 | c2, phi, true);
        Ok(())
    }

    pub fn apply_pauli_rotation(&mut self, p: &PauliString, phi: f64) -> Result<()> {
        if p.support() >> self.n_qubits != 0 {
            return Err(Error::invalid("pauli", "string wider than register"));
        }
        let n = self.n_qubits;
        let row = PauliString {
            x: p.x << n,
            z: p.z << n,
        };
        gates::apply_pauli_rotation(&mut self.elems, &row, phi, false);
        gates::apply_pauli_rotation(&mut self.elems, p, phi, true);
        Ok(())
    }

    /// `rho -> e^{-itH} rho e^{itH}`, each column and row through the Krylov exponential.
    pub fn expm_apply(&mut self, h: &PauliOperator, t: f64, tol: f64) -> Result<ExpmStats> {
        self.check_same(h.n_qubits())?;
        let dim = self.dim();
        let mut stats = ExpmStats::default();
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        // Split the tolerance over the 2*dim vector exponentials.
        let vtol = tol / (2.0 * dim as f64);
        for c in 0..dim {
            for r in 0..dim {
                buf[r] = self.elems[r * dim + c];
            }
            let s = krylov::expm_apply(h, &mut buf, t, vtol)?;
            merge(&mut stats, s);
            for r in 0..dim {
                self.elems[r * dim + c] = buf[r];
            }
        }
        for r in 0..dim {
            for c in 0..dim {
                buf[c] = self.elems[r * dim + c].conj();
            }
            let s = krylov::expm_apply(h, &mut buf, t, vtol)?;
            merge(&mut stats, s);
            for c in 0..dim {
                self.elems[r * dim + c] = buf[c].conj();
            }
        }
        Ok(stats)
    }

    /// `rho -> sum_k K_k rho K_k^dagger` on one qubit; rejects incomplete sets.
    pub fn apply_kraus(&mut self, qubit: usize, kraus: &[Mat2]) -> Result<()> {
        let ch = KrausChannel::new(kraus)?;
        self.apply_channel(qubit, &ch)
    }

    /// Apply a pre-validated channel.
    pub fn apply_channel(&mut self, qubit: usize, ch: &KrausChannel) -> Result<()> {
        let (row, col) = self.bits(qubit)?;
        let both = row | col;
        let offs = [[0, col], [row, row | col]];
        for base in 0..self.elems.len() {
            if base & both != 0 {
                continue;
            }
            let block = [
                [self.elems[base], self.elems[base | col]],
                [self.elems[base | row], self.elems[base | row | col]],
            ];
            let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
            for &(i, j, a, b, w) in &ch.map {
                out[i][j] += w * block[a][b];
            }
            for i in 0..2 {
                for j in 0..2 {
                    self.elems[base | offs[i][j]] = out[i][j];
                }
            }
        }
        Ok(())
    }
}

/// Partial trace of a pure state onto `keep` (kept qubits retain their relative order).
pub fn reduced_density(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::invalid("keep", "repeated qubit"));
    }
    if kept.is_empty() || kept.len() >= n {
        return Err(Error::invalid(
            "keep",
            "must be a nonempty strict subset of the qubits",
        ));
    }
    if let Some(&q) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::QubitOutOfRange {
            index: q,
            n_qubits: n,
        });
    }
    let k = kept.len();
    check_density_register(k)?;
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let dk = 1usize << k;
    let dr = 1usize << (n - k);
    // m[i][r] = psi[index(i, r)]
    let mut m = vec![Complex64::new(0.0, 0.0); dk * dr];
    for (b, &a) in state.amplitudes().iter().enumerate() {
        let mut i = 0;
        for &q in &kept {
            i = (i << 1) | usize::from(b & bit_of(n, q) != 0);
        }
        let mut r = 0;
        for &q in &traced {
            r = (r << 1) | usize::from(b & bit_of(n, q) != 0);
        }
        m[i * dr + r] = a;
    }
    let mut elems = vec![Complex64::new(0.0, 0.0); dk * dk];
    for i in 0..dk {
        let mi = &m[i * dr..(i + 1) * dr];
        for j in i..dk {
            let mj = &m[j * dr..(j + 1) * dr];
            let v: Complex64 = mi.iter().zip(mj).map(|(x, y)| x * y.conj()).sum();
            elems[i * dk + j] = v;
            elems[j * dk + i] = v.conj();
        }
    }
    Ok(DensityMatrix { n_qubits: k, elems })
}

impl StateVector {
    /// See [`reduced_density`].
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        reduced_density(self, keep)
    }
}

fn merge(acc: &mut ExpmStats, s: ExpmStats) {
    acc.substeps += s.substeps;
    acc.max_krylov_dim = acc.max_krylov_dim.max(s.max_krylov_dim);
    acc.error_estimate += s.error_estimate;
}

fn check_density_register(n: usize) -> Result<()> {
    check_register(n)?;
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::invalid(
            "n_qubits",
            format!("{n} qubits exceeds the density-matrix limit of {MAX_DENSITY_QUBITS}"),
        ));
    }
    Ok(())
}
