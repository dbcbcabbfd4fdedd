//! Lanczos-based action of `exp(-i t H)` on a vector.
//!
//! The Krylov space is grown from 10 up to 60 vectors; if the a-posteriori
//! error estimate `beta_m |[exp(-i tau T_m)]_{m,1}|` is still above the
//! per-substep budget at 60 vectors, the time step is halved. The budget is
//! `tol * |tau| / |t|`, so substep errors add up to at most `tol`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::pauli::PauliOperator;
use crate::{Error, Result};

const KRYLOV_START: usize = 10;
const KRYLOV_STEP: usize = 5;
pub const KRYLOV_MAX: usize = 60;
const MAX_SUBSTEPS: usize = 100_000;

/// Default accuracy of [`expm_apply`].
pub const DEFAULT_EXPM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExpmStats {
    pub substeps: usize,
    pub max_krylov_dim: usize,
    pub error_estimate: f64,
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal Lanczos basis with its tridiagonal projection.
pub(crate) struct LanczosBasis {
    pub vectors: Vec<Vec<Complex64>>,
    pub alpha: Vec<f64>,
    /// `beta[j]` couples `v_j` and `v_{j+1}`; the last entry is the residual norm.
    pub beta: Vec<f64>,
    pub exhausted: bool,
    next: Option<Vec<Complex64>>,
}

impl LanczosBasis {
    /// Start from `v` (normalized here). `locked` vectors are projected out at every step.
    pub fn new(v: &[Complex64]) -> Self {
        let nv = norm(v);
        let start: Vec<Complex64> = v.iter().map(|x| x / nv).collect();
        Self {
            vectors: Vec::new(),
            alpha: Vec::new(),
            beta: Vec::new(),
            exhausted: false,
            next: Some(start),
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// Grow to `m` vectors with full reorthogonalization (also against `locked`).
    pub fn extend(&mut self, h: &PauliOperator, m: usize, locked: &[Vec<Complex64>]) {
        let dim = h.dim();
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        while self.vectors.len() < m && !self.exhausted {
            let v = match self.next.take() {
                Some(v) => v,
                None => break,
            };
            h.apply_to(&v, &mut w);
            let a = dot(&v, &w).re;
            self.vectors.push(v);
            self.alpha.push(a);
            // Two passes of classical Gram-Schmidt keep the basis orthonormal to roundoff.
            for _ in 0..2 {
                for u in locked.iter().chain(self.vectors.iter()) {
                    let c = dot(u, &w);
                    for (wi, ui) in w.iter_mut().zip(u) {
                        *wi -= c * ui;
                    }
                }
            }
            let b = norm(&w);
            self.beta.push(b);
            let scale = a
                .abs()
                .max(self.alpha.iter().fold(0.0f64, |m, x| m.max(x.abs())))
                .max(1.0);
            if b <= 1e-13 * scale || self.vectors.len() + locked.len() >= dim {
                self.exhausted = true;
                self.next = None;
            } else {
                self.next = Some(w.iter().map(|x| x / b).collect());
            }
        }
    }

    /// Eigen-decomposition of the leading `m x m` tridiagonal block.
    pub fn tridiagonal_eigen(&self, m: usize) -> SymmetricEigen<f64, nalgebra::Dyn> {
        let mut t = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            t[(j, j)] = self.alpha[j];
            if j + 1 < m {
                t[(j, j + 1)] = self.beta[j];
                t[(j + 1, j)] = self.beta[j];
            }
        }
        SymmetricEigen::new(t)
    }

    /// `sum_k y_k v_k`
    pub fn combine(&self, y: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for (v, &c) in self.vectors.iter().zip(y) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
    }
}

/// Overwrite `psi` with `exp(-i t H) psi`.
pub fn expm_apply(h: &PauliOperator, psi: &mut [Complex64], t: f64, tol: f64) -> Result<ExpmStats> {
    if psi.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: psi.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("{tol} must be positive")));
    }
    if !t.is_finite() {
        return Err(Error::invalid("t", "time must be finite"));
    }
    let mut stats = ExpmStats::default();
    let scale = norm(psi);
    if t == 0.0 || scale == 0.0 || h.n_terms() == 0 {
        return Ok(stats);
    }
    let dim = psi.len();
    let total = t.abs();
    let mut done = 0.0;
    let mut tau = total;
    while done < total {
        tau = tau.min(total - done);
        let mut basis = LanczosBasis::new(psi);
        let mut m = KRYLOV_START.min(dim);
        let accepted = loop {
            basis.extend(h, m, &[]);
            let m_eff = basis.len();
            let eig = basis.tridiagonal_eigen(m_eff);
            let budget = tol * tau / total;
            let (y, err) = propagate(
                &eig,
                m_eff,
                basis.beta[m_eff - 1],
                tau * t.signum(),
                basis.exhausted,
            );
            if err <= budget {
                stats.error_estimate += err;
                stats.max_krylov_dim = stats.max_krylov_dim.max(m_eff);
                break Some(y);
            }
            if !basis.exhausted && m < KRYLOV_MAX.min(dim) {
                m = (m + KRYLOV_STEP).min(KRYLOV_MAX).min(dim);
                continue;
            }
            // Halve the step until the fixed basis meets the budget.
            let mut sub = tau;
            let mut found = None;
            while sub > total * 1e-12 {
                sub *= 0.5;
                let (y, e) = propagate(&eig, m_eff, basis.beta[m_eff - 1], sub * t.signum(), false);
                if e <= tol * sub / total {
                    stats.error_estimate += e;
                    stats.max_krylov_dim = stats.max_krylov_dim.max(m_eff);
                    found = Some((y, sub));
                    break;
                }
            }
            match found {
                Some((y, sub)) => {
                    tau = sub;
                    break Some(y);
                }
                None => break None,
            }
        };
        let y = accepted.ok_or(Error::NoConvergence {
            what: "Krylov exponential",
            residual: stats.error_estimate,
        })?;
        let scaled: Vec<Complex64> = y.iter().map(|c| c * scale).collect();
        basis.combine(&scaled, psi);
        done += tau;
        stats.substeps += 1;
        if stats.substeps > MAX_SUBSTEPS {
            return Err(Error::NoConvergence {
                what: "Krylov exponential",
                residual: stats.error_estimate,
            });
        }
        // Let the next step try a longer stride again.
        tau *= 2.0;
    }
    Ok(stats)
}

/// `y = exp(-i tau T) e_1` and the error estimate `beta_m |y_m|`.
fn propagate(
    eig: &SymmetricEigen<f64, nalgebra::Dyn>,
    m: usize,
    beta_m: f64,
    tau: f64,
    exact: bool,
) -> (Vec<Complex64>, f64) {
    let q = &eig.eigenvectors;
    let mut y = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..m {
        let w = Complex64::from_polar(q[(0, k)], -tau * eig.eigenvalues[k]);
        for (j, yj) in y.iter_mut().enumerate() {
            *yj += q[(j, k)] * w;
        }
    }
    let err = if exact { 0.0 } else { beta_m * y[m - 1].norm() };
    (y, err)
}
