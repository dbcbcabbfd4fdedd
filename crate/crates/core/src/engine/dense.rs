//! Dense linear algebra for small registers: full diagonalization for exact
//! ground states and dense exponentials used as test oracles.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pauli::PauliOperator;

/// Eigenvalues (ascending) and eigenvectors of a row-major Hermitian matrix.
///
/// Real matrices go through the real symmetric solver.
pub fn hermitian_eigen(mat: &[Complex64], dim: usize) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    assert_eq!(mat.len(), dim * dim);
    let is_real = mat.iter().all(|c| c.im == 0.0);
    let (values, vectors): (Vec<f64>, Vec<Vec<Complex64>>) = if is_real {
        let m = DMatrix::<f64>::from_fn(dim, dim, |i, j| mat[i * dim + j].re);
        let eig = m.symmetric_eigen();
        let vecs = (0..dim)
            .map(|k| {
                eig.eigenvectors
                    .column(k)
                    .iter()
                    .map(|&x| Complex64::new(x, 0.0))
                    .collect()
            })
            .collect();
        (eig.eigenvalues.iter().copied().collect(), vecs)
    } else {
        let m = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| mat[i * dim + j]);
        let eig = m.symmetric_eigen();
        let vecs = (0..dim)
            .map(|k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect();
        (eig.eigenvalues.iter().copied().collect(), vecs)
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    (
        order.iter().map(|&k| values[k]).collect(),
        order.iter().map(|&k| vectors[k].clone()).collect(),
    )
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(mat: &[Complex64], dim: usize) -> Vec<f64> {
    let is_real = mat.iter().all(|c| c.im == 0.0);
    let mut values: Vec<f64> = if is_real {
        DMatrix::<f64>::from_fn(dim, dim, |i, j| mat[i * dim + j].re)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        DMatrix::<Complex64>::from_fn(dim, dim, |i, j| mat[i * dim + j])
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    };
    values.sort_by(f64::total_cmp);
    values
}

/// `exp(-i t H) psi` by full diagonalization.
pub fn expm_apply_dense(h: &PauliOperator, psi: &[Complex64], t: f64) -> Vec<Complex64> {
    let dim = h.dim();
    let (vals, vecs) = hermitian_eigen(&h.to_dense(), dim);
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (lam, v) in vals.iter().zip(&vecs) {
        let c: Complex64 = v.iter().zip(psi).map(|(a, b)| a.conj() * b).sum();
        let c = c * Complex64::from_polar(1.0, -t * lam);
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

/// Row-major dense product `a * b`.
pub fn matmul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

/// Conjugate transpose of a row-major square matrix.
pub fn dagger(a: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[j * dim + i] = a[i * dim + j].conj();
        }
    }
    out
}

/// Dense matrix-vector product.
pub fn matvec(a: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let dim = v.len();
    (0..dim)
        .map(|i| (0..dim).map(|j| a[i * dim + j] * v[j]).sum())
        .collect()
}

/// Dense `exp(-i t H)` as a matrix.
pub fn expm_dense(h: &PauliOperator, t: f64) -> Vec<Complex64> {
    let dim = h.dim();
    let (vals, vecs) = hermitian_eigen(&h.to_dense(), dim);
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (lam, v) in vals.iter().zip(&vecs) {
        let ph = Complex64::from_polar(1.0, -t * lam);
        for i in 0..dim {
            let vi = v[i] * ph;
            for j in 0..dim {
                out[i * dim + j] += vi * v[j].conj();
            }
        }
    }
    out
}
