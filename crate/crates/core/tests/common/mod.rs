#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C = Complex64;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn single(p: char) -> DMatrix<C> {
    let z = c(0.0);
    let o = c(1.0);
    let i = C::new(0.0, 1.0);
    match p {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad label {p}"),
    }
}

/// Kronecker product of single-qubit Paulis, qubit 0 leftmost.
pub fn kron_label(label: &str) -> DMatrix<C> {
    let mut m = DMatrix::from_element(1, 1, c(1.0));
    for ch in label.chars() {
        m = m.kronecker(&single(ch));
    }
    m
}

/// Dense matrix of a sum of labeled Pauli strings.
pub fn dense_sum(terms: &[(f64, String)]) -> DMatrix<C> {
    let n = terms[0].1.len();
    let mut m = DMatrix::from_element(1 << n, 1 << n, c(0.0));
    for (w, l) in terms {
        m += kron_label(l) * c(*w);
    }
    m
}

/// Label with `p` at the given positions.
pub fn label(n: usize, at: &[(usize, char)]) -> String {
    let mut v = vec!['I'; n];
    for &(q, p) in at {
        v[q] = p;
    }
    v.into_iter().collect()
}

pub fn eigenvalues(m: &DMatrix<C>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Dense state from a matrix-vector product.
pub fn apply(m: &DMatrix<C>, v: &[C]) -> Vec<C> {
    let x = nalgebra::DVector::from_column_slice(v);
    (m * x).iter().copied().collect()
}

/// Dense `exp(-i t H)` via eigen-decomposition.
pub fn expm(h: &DMatrix<C>, t: f64) -> DMatrix<C> {
    let eig = h.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C::from_polar(1.0, -t * e)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
