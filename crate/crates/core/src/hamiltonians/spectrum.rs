use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::engine::dense;
use crate::engine::krylov::{dot, norm, LanczosBasis};
use crate::engine::{PauliOperator, StateVector};
use crate::{Error, Result};

/// Eigenvalues within this distance of the minimum belong to the ground manifold.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Largest Hilbert-space dimension diagonalized densely by [`Method::Auto`].
pub const DENSE_MAX_DIM: usize = 256;

const LOCK_RESIDUAL: f64 = 1e-9;
const BASIS_MAX: usize = 150;
const MAX_RESTARTS: usize = 400;
const START_SEED: u64 = 0x5eed_1a2c;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

/// Lowest part of a spectrum.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<StateVector>>,
    pub ground_degeneracy: usize,
    /// First eigenvalue above the ground manifold, if the space has one.
    pub next_level: Option<f64>,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Gap from the ground manifold to the next level.
    pub fn gap(&self) -> Option<f64> {
        self.next_level.map(|e| e - self.eigenvalues[0])
    }

    /// Orthonormal basis of the ground manifold.
    pub fn ground_states(&self) -> &[StateVector] {
        match &self.eigenvectors {
            Some(v) => &v[..self.ground_degeneracy],
            None => &[],
        }
    }
}

/// Lowest `k` eigenpairs, extended to cover the whole degenerate ground manifold.
pub fn ground_space(h: &PauliOperator, k: usize) -> Result<Spectrum> {
    ground_space_with(h, k, Method::Auto)
}

pub fn ground_space_with(h: &PauliOperator, k: usize, method: Method) -> Result<Spectrum> {
    if k == 0 {
        return Err(Error::invalid("k", "need at least one eigenpair"));
    }
    let dim = h.dim();
    let dense = match method {
        Method::Auto => dim <= DENSE_MAX_DIM,
        Method::Dense => true,
        Method::Lanczos => false,
    };
    let (vals, vecs) = if dense {
        dense::hermitian_eigen(&h.to_dense(), dim)
    } else {
        lanczos_levels(h, k)?
    };
    let e0 = vals[0];
    let g = vals
        .iter()
        .take_while(|&&e| e - e0 <= DEGENERACY_TOL)
        .count();
    let keep = k.max(g).min(vals.len());
    let next_level = vals.get(g).copied();
    let eigenvectors = vecs
        .into_iter()
        .take(keep)
        .map(|v| StateVector::normalized(v))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum {
        eigenvalues: vals[..keep].to_vec(),
        eigenvectors: Some(eigenvectors),
        ground_degeneracy: g,
        next_level,
    })
}

/// Largest eigenvalue.
pub fn max_eigenvalue(h: &PauliOperator) -> Result<f64> {
    let dim = h.dim();
    if dim <= DENSE_MAX_DIM {
        let v = dense::hermitian_eigenvalues(&h.to_dense(), dim);
        return Ok(v[dim - 1]);
    }
    let neg = h.scaled(-1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let (e, _) = lowest_deflated(&neg, &[], &mut rng)?;
    Ok(-e)
}

/// Converge eigenpairs one at a time from the bottom, deflating locked vectors,
/// until at least `k` are known and one level above the ground manifold is found.
fn lanczos_levels(h: &PauliOperator, k: usize) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let dim = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut vals: Vec<f64> = Vec::new();
    let mut vecs: Vec<Vec<Complex64>> = Vec::new();
    while vals.len() < dim {
        let (e, v) = lowest_deflated(h, &vecs, &mut rng)?;
        vals.push(e);
        vecs.push(v);
        let above = vals.iter().any(|&x| x - vals[0] > DEGENERACY_TOL);
        if vals.len() >= k && above {
            break;
        }
    }
    // Deflation can return near-equal values slightly out of order.
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    Ok((
        order.iter().map(|&i| vals[i]).collect(),
        order.iter().map(|&i| vecs[i].clone()).collect(),
    ))
}

fn random_start(dim: usize, locked: &[Vec<Complex64>], rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        orthogonalize(&mut v, locked);
        let nv = norm(&v);
        if nv > 1e-6 {
            v.iter_mut().for_each(|x| *x /= nv);
            return v;
        }
    }
}

fn orthogonalize(v: &mut [Complex64], against: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for u in against {
            let c = dot(u, v);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= c * ui;
            }
        }
    }
}

/// Lowest eigenpair of `h` on the orthogonal complement of `locked`, by
/// explicitly restarted Lanczos.
fn lowest_deflated(
    h: &PauliOperator,
    locked: &[Vec<Complex64>],
    rng: &mut ChaCha8Rng,
) -> Result<(f64, Vec<Complex64>)> {
    let dim = h.dim();
    let room = dim - locked.len();
    let m = BASIS_MAX.min(room);
    let mut start = random_start(dim, locked, rng);
    let mut hv = vec![Complex64::new(0.0, 0.0); dim];
    let mut last_residual = f64::INFINITY;
    for _ in 0..MAX_RESTARTS {
        let mut basis = LanczosBasis::new(&start);
        basis.extend(h, m, locked);
        let m_eff = basis.len();
        let eig = basis.tridiagonal_eigen(m_eff);
        let idx = (0..m_eff)
            .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
            .expect("nonempty basis");
        let y: Vec<Complex64> = (0..m_eff)
            .map(|j| Complex64::new(eig.eigenvectors[(j, idx)], 0.0))
            .collect();
        let mut ritz = vec![Complex64::new(0.0, 0.0); dim];
        basis.combine(&y, &mut ritz);
        orthogonalize(&mut ritz, locked);
        let nr = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= nr);
        h.apply_to(&ritz, &mut hv);
        let e = dot(&ritz, &hv).re;
        let residual = hv
            .iter()
            .zip(&ritz)
            .map(|(a, b)| (a - e * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual < LOCK_RESIDUAL || (basis.exhausted && m_eff == room) {
            return Ok((e, ritz));
        }
        last_residual = residual;
        start = ritz;
    }
    Err(Error::NoConvergence {
        what: "Lanczos eigensolver",
        residual: last_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_tfim, build_xxz, Boundary};

    #[test]
    fn tfim_two_sites() {
        let s = ground_space(&build_tfim(2, 1.0, Boundary::Open).unwrap(), 1).unwrap();
        assert!((s.ground_energy() + 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.ground_degeneracy, 1);
    }

    #[test]
    fn ferromagnetic_multiplet_degeneracy() {
        let h = build_xxz(4, 1.0, Boundary::Periodic).unwrap();
        let s = ground_space(&h, 1).unwrap();
        assert_eq!(s.ground_degeneracy, 5);
        assert_eq!(s.ground_states().len(), 5);
        let l = ground_space_with(&h, 1, Method::Lanczos).unwrap();
        assert_eq!(l.ground_degeneracy, 5);
        assert!((l.ground_energy() - s.ground_energy()).abs() < 1e-9);
        assert!((l.next_level.unwrap() - s.next_level.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn lanczos_matches_dense_on_tfim8() {
        let h = build_tfim(8, 1.0, Boundary::Open).unwrap();
        let d = ground_space_with(&h, 3, Method::Dense).unwrap();
        let l = ground_space_with(&h, 3, Method::Lanczos).unwrap();
        for (a, b) in d.eigenvalues.iter().zip(&l.eigenvalues) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn max_eigenvalue_of_tfim() {
        let h = build_tfim(9, 1.0, Boundary::Open).unwrap();
        let m = max_eigenvalue(&h).unwrap();
        let g = ground_space_with(&h.scaled(-1.0), 1, Method::Dense).unwrap();
        assert!((m + g.ground_energy()).abs() < 1e-8);
    }

    #[test]
    fn zero_k_rejected() {
        assert!(ground_space(&build_tfim(2, 1.0, Boundary::Open).unwrap(), 0).is_err());
    }
}
