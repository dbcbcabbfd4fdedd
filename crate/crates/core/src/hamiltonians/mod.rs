//! Spin-chain Hamiltonians as Pauli operators, exact diagonalization and the
//! long-range TFIM critical-point locator.
//!
//! Positions are `x_i = i`. Sums over `i != j` count both orderings, so every
//! unordered pair carries twice the single-ordering weight unless noted.

mod critical;
mod spectrum;

pub use critical::{critical_theta, gap_above_ground};
pub use spectrum::{
    ground_space, ground_space_with, max_eigenvalue, Method, Spectrum, DEGENERACY_TOL,
    DENSE_MAX_DIM,
};

use serde::{Deserialize, Serialize};

use crate::engine::{Pauli, PauliOperator, PauliString};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// A named model with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Xxz { delta: f64 },
    Tfim { g: f64 },
    Lrtfim { alpha: f64, theta: f64 },
    WqedXx { j: f64, l: f64 },
    WqedI { j: f64, l: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: Model,
    pub n_qubits: usize,
    #[serde(default)]
    pub boundary: Boundary,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        check_n(self.n_qubits)?;
        match self.model {
            Model::Lrtfim { alpha, theta } => {
                check_alpha(alpha)?;
                check_theta(theta)?;
                check_open(self.boundary)
            }
            Model::WqedXx { j, l } | Model::WqedI { j, l } => {
                check_finite("j", j)?;
                check_range(l)?;
                check_open(self.boundary)
            }
            Model::Xxz { delta } => check_finite("delta", delta),
            Model::Tfim { g } => check_finite("g", g),
        }
    }

    pub fn build(&self) -> Result<PauliOperator> {
        self.validate()?;
        let n = self.n_qubits;
        match self.model {
            Model::Xxz { delta } => build_xxz(n, delta, self.boundary),
            Model::Tfim { g } => build_tfim(n, g, self.boundary),
            Model::Lrtfim { alpha, theta } => build_lrtfim(n, alpha, theta, self.boundary),
            Model::WqedXx { j, l } => build_wqed_xx(n, j, l),
            Model::WqedI { j, l } => build_wqed_ising(n, j, l),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(
            "n",
            format!("need at least 2 qubits, got {n}"),
        ));
    }
    Ok(())
}

fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::invalid(name, format!("{v} is not finite")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", format!("{alpha} must be positive")));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::invalid(
            "theta",
            format!("{theta} outside [0, pi/2]"),
        ));
    }
    Ok(())
}

fn check_range(l: f64) -> Result<()> {
    if !(l > 0.0) || l.is_nan() {
        return Err(Error::invalid("l", format!("{l} must be positive")));
    }
    Ok(())
}

fn check_open(bc: Boundary) -> Result<()> {
    if bc != Boundary::Open {
        return Err(Error::invalid(
            "boundary",
            "only open boundaries are supported for this model",
        ));
    }
    Ok(())
}

fn pair(n: usize, i: usize, j: usize, p: Pauli) -> PauliString {
    PauliString::from_sparse(n, &[(i, p), (j, p)]).expect("pair indices in range")
}

fn single(n: usize, i: usize, p: Pauli) -> PauliString {
    PauliString::from_sparse(n, &[(i, p)]).expect("index in range")
}

/// Nearest-neighbour bonds; the wrap bond is added for periodic chains with n > 2.
pub fn bonds(n: usize, bc: Boundary) -> Vec<(usize, usize)> {
    let mut b: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if bc == Boundary::Periodic && n > 2 {
        b.push((n - 1, 0));
    }
    b
}

/// `sum (X X + Y Y) - delta sum Z Z` over bonds.
pub fn build_xxz(n: usize, delta: f64, bc: Boundary) -> Result<PauliOperator> {
    check_n(n)?;
    check_finite("delta", delta)?;
    let mut terms = Vec::new();
    for (i, j) in bonds(n, bc) {
        terms.push((1.0, pair(n, i, j, Pauli::X)));
        terms.push((1.0, pair(n, i, j, Pauli::Y)));
        terms.push((-delta, pair(n, i, j, Pauli::Z)));
    }
    PauliOperator::new(n, terms)
}

/// `-sum X X + g sum Z`.
pub fn build_tfim(n: usize, g: f64, bc: Boundary) -> Result<PauliOperator> {
    check_n(n)?;
    check_finite("g", g)?;
    let mut terms: Vec<(f64, PauliString)> = bonds(n, bc)
        .into_iter()
        .map(|(i, j)| (-1.0, pair(n, i, j, Pauli::X)))
        .collect();
    terms.extend((0..n).map(|i| (g, single(n, i, Pauli::Z))));
    PauliOperator::new(n, terms)
}

/// `-sin(theta) sum_{i!=j} X_i X_j / |i-j|^alpha + cos(theta) sum Z`, open chain.
pub fn build_lrtfim(n: usize, alpha: f64, theta: f64, bc: Boundary) -> Result<PauliOperator> {
    check_n(n)?;
    check_alpha(alpha)?;
    check_theta(theta)?;
    check_open(bc)?;
    let s = theta.sin();
    let mut terms = ising_pairs(n, |r| -2.0 * s / (r as f64).powf(alpha));
    terms.extend((0..n).map(|i| (theta.cos(), single(n, i, Pauli::Z))));
    PauliOperator::new(n, terms)
}

/// Flip-flop generator: weight `J e^{-r/L}` times `(X X + Y Y)/2` per unordered pair.
pub fn build_wqed_xx(n: usize, j: f64, l: f64) -> Result<PauliOperator> {
    check_n(n)?;
    check_finite("j", j)?;
    check_range(l)?;
    PauliOperator::new(n, flip_flop_pairs(n, |r| j * (-(r as f64) / l).exp()))
}

/// Ising generator: weight `2 J e^{-r/L}` on `X X` per unordered pair.
pub fn build_wqed_ising(n: usize, j: f64, l: f64) -> Result<PauliOperator> {
    check_n(n)?;
    check_finite("j", j)?;
    check_range(l)?;
    PauliOperator::new(n, ising_pairs(n, |r| 2.0 * j * (-(r as f64) / l).exp()))
}

/// `sum_{i<j} w(|i-j|) X_i X_j`; zero weights are dropped.
pub fn ising_pairs(n: usize, w: impl Fn(usize) -> f64) -> Vec<(f64, PauliString)> {
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = w(j - i);
            if c != 0.0 {
                terms.push((c, pair(n, i, j, Pauli::X)));
            }
        }
    }
    terms
}

/// `sum_{i<j} w(|i-j|) (X_i X_j + Y_i Y_j) / 2`.
pub fn flip_flop_pairs(n: usize, w: impl Fn(usize) -> f64) -> Vec<(f64, PauliString)> {
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = 0.5 * w(j - i);
            if c != 0.0 {
                terms.push((c, pair(n, i, j, Pauli::X)));
                terms.push((c, pair(n, i, j, Pauli::Y)));
            }
        }
    }
    terms
}

/// `sum_i Z_i`
pub fn total_z(n: usize) -> Result<PauliOperator> {
    PauliOperator::new(n, (0..n).map(|i| (1.0, single(n, i, Pauli::Z))))
}

/// `sum Z_i Z_j` over bonds.
pub fn zz_bonds(n: usize, bc: Boundary) -> Result<PauliOperator> {
    PauliOperator::new(
        n,
        bonds(n, bc)
            .into_iter()
            .map(|(i, j)| (1.0, pair(n, i, j, Pauli::Z))),
    )
}

/// `(1-s) h0 + s htarget`
pub fn build_cost(s: f64, h0: &PauliOperator, htarget: &PauliOperator) -> Result<PauliOperator> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid("s", format!("{s} outside [0, 1]")));
    }
    h0.linear_combination(1.0 - s, htarget, s)
}
