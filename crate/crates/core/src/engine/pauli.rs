//! Sparse Pauli-sum operators.
//!
//! A Pauli string is stored as a pair of bit masks over basis indices: `x`
//! marks qubits carrying X or Y, `z` marks qubits carrying Z or Y. With qubit 0
//! the most significant bit, qubit `q` of an `n`-qubit register lives at bit
//! `n - 1 - q`. The action on a basis state is then
//! `P|b> = i^{#Y} (-1)^{popcount(b & z)} |b ^ x>`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::{Error, Result};

pub(crate) const MAX_QUBITS: usize = 30;

#[inline]
pub(crate) fn bit_of(n_qubits: usize, qubit: usize) -> usize {
    1usize << (n_qubits - 1 - qubit)
}

#[inline]
fn parity(v: usize) -> bool {
    v.count_ones() & 1 == 1
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis, as bit masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    pub x: usize,
    pub z: usize,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    /// Build from `(qubit, pauli)` pairs.
    pub fn from_sparse(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = PauliString::IDENTITY;
        for &(q, p) in ops {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            let bit = bit_of(n_qubits, q);
            if (s.x | s.z) & bit != 0 {
                return Err(Error::RepeatedQubit(q));
            }
            match p {
                Pauli::I => {}
                Pauli::X => s.x |= bit,
                Pauli::Y => {
                    s.x |= bit;
                    s.z |= bit
                }
                Pauli::Z => s.z |= bit,
            }
        }
        Ok(s)
    }

    /// Parse a dense label such as `"XZIY"` (qubit 0 first).
    pub fn from_label(label: &str) -> Result<Self> {
        let n = label.chars().count();
        let ops = label
            .chars()
            .enumerate()
            .map(|(q, c)| {
                Pauli::from_char(c)
                    .map(|p| (q, p))
                    .ok_or_else(|| Error::invalid("label", format!("bad Pauli character {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_sparse(n, &ops)
    }

    pub fn pauli_at(&self, n_qubits: usize, qubit: usize) -> Pauli {
        let bit = bit_of(n_qubits, qubit);
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn label(&self, n_qubits: usize) -> String {
        (0..n_qubits)
            .map(|q| self.pauli_at(n_qubits, q).as_char())
            .collect()
    }

    pub fn n_y(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Mask of qubit bits this string acts on non-trivially.
    pub fn support(&self) -> usize {
        self.x | self.z
    }

    /// Qubits acted on, ascending.
    pub fn support_qubits(&self, n_qubits: usize) -> Vec<usize> {
        (0..n_qubits)
            .filter(|&q| self.support() & bit_of(n_qubits, q) != 0)
            .collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        !parity((self.x & other.z) ^ (self.z & other.x))
    }

    /// `i^{#Y}` prefactor of the basis action.
    pub fn y_phase(&self) -> Complex64 {
        match self.n_y() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Phase picked up by basis state `b`: `P|b> = phase * |b ^ x>`.
    #[inline]
    pub fn phase_on(&self, b: usize) -> Complex64 {
        let sign = if parity(b & self.z) { -1.0 } else { 1.0 };
        self.y_phase() * sign
    }
}

/// One flip-mask group of a compiled operator.
#[derive(Debug, Clone)]
pub(crate) struct MaskGroup {
    pub x: usize,
    /// `(z mask, coefficient * i^{#Y})`
    pub terms: Vec<(usize, Complex64)>,
}

/// Hermitian operator written as a real-weighted sum of Pauli strings.
///
/// Terms are merged on construction; exact zeros are dropped. Matrix-vector
/// products go through a grouping by flip mask, so no matrix is ever stored.
#[derive(Debug, Clone)]
pub struct PauliOperator {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
    groups: Vec<MaskGroup>,
}

impl PartialEq for PauliOperator {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.terms == other.terms
    }
}

impl PauliOperator {
    pub fn new(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (f64, PauliString)>,
    ) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::invalid(
                "n_qubits",
                format!("{n_qubits} outside 1..={MAX_QUBITS}"),
            ));
        }
        let dim_mask = (1usize << n_qubits) - 1;
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (c, s) in terms {
            if !c.is_finite() {
                return Err(Error::invalid("coefficient", format!("{c} is not finite")));
            }
            if s.support() & !dim_mask != 0 {
                return Err(Error::invalid(
                    "term",
                    format!("string acts outside {n_qubits} qubits"),
                ));
            }
            *merged.entry(s).or_insert(0.0) += c;
        }
        let terms: Vec<(f64, PauliString)> = merged
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|(s, c)| (c, s))
            .collect();
        Ok(Self::from_merged(n_qubits, terms))
    }

    fn from_merged(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Self {
        let mut by_mask: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for &(c, s) in &terms {
            by_mask.entry(s.x).or_default().push((s.z, s.y_phase() * c));
        }
        let groups = by_mask
            .into_iter()
            .map(|(x, terms)| MaskGroup { x, terms })
            .collect();
        Self {
            n_qubits,
            terms,
            groups,
        }
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, std::iter::empty())
    }

    /// Parse `(coefficient, label)` pairs.
    pub fn from_labels(terms: &[(f64, &str)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|(_, l)| l.len())
            .ok_or_else(|| Error::invalid("terms", "empty label list"))?;
        let parsed = terms
            .iter()
            .map(|&(c, l)| {
                if l.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: l.len(),
                    });
                }
                Ok((c, PauliString::from_label(l)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, parsed)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of a given string (0 if absent).
    pub fn coefficient(&self, s: &PauliString) -> f64 {
        self.terms
            .iter()
            .find(|(_, t)| t == s)
            .map(|&(c, _)| c)
            .unwrap_or(0.0)
    }

    /// Sum of absolute coefficients; an upper bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    pub fn scaled(&self, factor: f64) -> PauliOperator {
        PauliOperator::new(
            self.n_qubits,
            self.terms.iter().map(|&(c, s)| (c * factor, s)),
        )
        .expect("scaling keeps a valid operator")
    }

    /// `a * self + b * other`, merged term by term.
    pub fn linear_combination(
        &self,
        a: f64,
        other: &PauliOperator,
        b: f64,
    ) -> Result<PauliOperator> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        PauliOperator::new(
            self.n_qubits,
            self.terms
                .iter()
                .map(|&(c, s)| (a * c, s))
                .chain(other.terms.iter().map(|&(c, s)| (b * c, s))),
        )
    }

    pub fn add(&self, other: &PauliOperator) -> Result<PauliOperator> {
        self.linear_combination(1.0, other, 1.0)
    }

    /// Shift by a multiple of the identity.
    pub fn shifted(&self, c: f64) -> PauliOperator {
        PauliOperator::new(
            self.n_qubits,
            self.terms
                .iter()
                .copied()
                .chain(std::iter::once((c, PauliString::IDENTITY))),
        )
        .expect("identity shift keeps a valid operator")
    }

    /// Whether every pair of terms commutes.
    pub fn terms_commute(&self) -> bool {
        self.terms
            .iter()
            .enumerate()
            .all(|(i, (_, a))| self.terms[i + 1..].iter().all(|(_, b)| a.commutes_with(b)))
    }

    /// True when the matrix in the computational basis is real (even number of Y in every term).
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, s)| s.n_y() % 2 == 0)
    }

    /// Qubits touched by at least one term.
    pub fn support_qubits(&self) -> Vec<usize> {
        let mask = self.terms.iter().fold(0, |m, (_, s)| m | s.support());
        (0..self.n_qubits)
            .filter(|&q| mask & bit_of(self.n_qubits, q) != 0)
            .collect()
    }

    /// `out = H * input` over raw amplitude slices.
    pub fn apply_to(&self, input: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(input.len(), self.dim());
        out.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        for g in &self.groups {
            if g.terms.len() == 1 {
                let (z, c) = g.terms[0];
                for (b, &a) in input.iter().enumerate() {
                    let v = if parity(b & z) { -c * a } else { c * a };
                    out[b ^ g.x] += v;
                }
            } else {
                for (b, &a) in input.iter().enumerate() {
                    let mut f = Complex64::new(0.0, 0.0);
                    for &(z, c) in &g.terms {
                        if parity(b & z) {
                            f -= c;
                        } else {
                            f += c;
                        }
                    }
                    out[b ^ g.x] += f * a;
                }
            }
        }
    }

    /// `<psi|H|psi>` over raw amplitudes (not normalized).
    pub fn expectation_raw(&self, psi: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for g in &self.groups {
            for (b, &a) in psi.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let mut f = Complex64::new(0.0, 0.0);
                for &(z, c) in &g.terms {
                    if parity(b & z) {
                        f -= c;
                    } else {
                        f += c;
                    }
                }
                acc += psi[b ^ g.x].conj() * f * a;
            }
        }
        acc
    }

    /// `tr(H rho)` for a row-major density matrix.
    pub fn trace_with(&self, rho: &[Complex64]) -> Complex64 {
        let dim = self.dim();
        debug_assert_eq!(rho.len(), dim * dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for g in &self.groups {
            for b in 0..dim {
                let mut f = Complex64::new(0.0, 0.0);
                for &(z, c) in &g.terms {
                    if parity(b & z) {
                        f -= c;
                    } else {
                        f += c;
                    }
                }
                // <b^x| P |b> = f, so tr(P rho) = sum_b f * rho[b, b^x]
                acc += f * rho[b * dim + (b ^ g.x)];
            }
        }
        acc
    }

    /// Dense matrix, row-major. Intended for small registers (oracles and ED).
    pub fn to_dense(&self) -> Vec<Complex64> {
        let dim = self.dim();
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for g in &self.groups {
            for b in 0..dim {
                let mut f = Complex64::new(0.0, 0.0);
                for &(z, c) in &g.terms {
                    if parity(b & z) {
                        f -= c;
                    } else {
                        f += c;
                    }
                }
                m[(b ^ g.x) * dim + b] += f;
            }
        }
        m
    }

    /// Frobenius norm of the commutator `[self, other]`, computed on the Pauli algebra.
    pub fn commutator_norm(&self, other: &PauliOperator) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        // [P, Q] = 2 P Q for anticommuting strings, 0 otherwise.
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for &(a, p) in &self.terms {
            for &(b, q) in &other.terms {
                if p.commutes_with(&q) {
                    continue;
                }
                let (phase, r) = multiply_strings(&p, &q);
                *acc.entry(r).or_insert(Complex64::new(0.0, 0.0)) += phase * (2.0 * a * b);
            }
        }
        // Distinct Pauli strings are orthogonal with norm sqrt(dim).
        let sum: f64 = acc.values().map(|c| c.norm_sqr()).sum();
        Ok((sum * self.dim() as f64).sqrt())
    }
}

/// Product `p * q = phase * r` of two Pauli strings.
pub fn multiply_strings(p: &PauliString, q: &PauliString) -> (Complex64, PauliString) {
    // Write P = i^{y_p} X^{x_p} Z^{z_p}; moving Z^{z_p} past X^{x_q} gives (-1)^{|z_p & x_q|}.
    let r = PauliString {
        x: p.x ^ q.x,
        z: p.z ^ q.z,
    };
    let sign = if parity(p.z & q.x) { -1.0 } else { 1.0 };
    let pow = (p.n_y() + q.n_y()) as i64 - r.n_y() as i64;
    let ipow = match pow.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    (ipow * sign, r)
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, s)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c} {}", s.label(self.n_qubits))?;
        }
        Ok(())
    }
}
