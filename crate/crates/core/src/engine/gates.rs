//! Small gate matrices and the in-place kernels that apply them to raw
//! amplitude slices. Kernels address a qubit by its bit mask, so the same code
//! drives both statevectors and the row/column halves of a density matrix.

use num_complex::Complex64;

use super::pauli::PauliString;
use crate::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn identity2() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

/// `exp(-i theta X)`
pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[c.into(), -I * s], [-I * s, c.into()]]
}

/// `exp(-i theta Y)`
pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[c.into(), (-s).into()], [s.into(), c.into()]]
}

/// `exp(-i theta Z)`
pub fn rz(theta: f64) -> Mat2 {
    [
        [Complex64::from_polar(1.0, -theta), ZERO],
        [ZERO, Complex64::from_polar(1.0, theta)],
    ]
}

pub fn cz() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = if k == 3 { -ONE } else { ONE };
    }
    m
}

/// `exp(-i phi X (x) X)`
pub fn xx_rotation(phi: f64) -> Mat4 {
    let (s, c) = phi.sin_cos();
    let mut m = [[ZERO; 4]; 4];
    for k in 0..4 {
        m[k][k] = c.into();
        m[k][3 - k] = -I * s;
    }
    m
}

/// Largest entry of `U^dagger U - I`.
pub fn unitarity_defect<const N: usize>(u: &[[Complex64; N]; N]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..N {
        for j in 0..N {
            let mut s = ZERO;
            for k in 0..N {
                s += u[k][i].conj() * u[k][j];
            }
            if i == j {
                s -= ONE;
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

pub(crate) fn check_unitary<const N: usize>(u: &[[Complex64; N]; N], tol: f64) -> Result<()> {
    let d = unitarity_defect(u);
    if d > tol || !d.is_finite() {
        return Err(Error::NotUnitary(d));
    }
    Ok(())
}

#[inline]
fn maybe_conj(c: Complex64, conj: bool) -> Complex64 {
    if conj {
        c.conj()
    } else {
        c
    }
}

/// Apply a 2x2 matrix (or its complex conjugate) on the bit `bit`.
pub(crate) fn apply_mat2(amps: &mut [Complex64], bit: usize, u: &Mat2, conj: bool) {
    let u00 = maybe_conj(u[0][0], conj);
    let u01 = maybe_conj(u[0][1], conj);
    let u10 = maybe_conj(u[1][0], conj);
    let u11 = maybe_conj(u[1][1], conj);
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for b in base..base + bit {
            let a0 = amps[b];
            let a1 = amps[b | bit];
            amps[b] = u00 * a0 + u01 * a1;
            amps[b | bit] = u10 * a0 + u11 * a1;
        }
        base += 2 * bit;
    }
}

/// Diagonal 2x2 matrix fast path.
pub(crate) fn apply_diag2(amps: &mut [Complex64], bit: usize, d0: Complex64, d1: Complex64) {
    for (b, a) in amps.iter_mut().enumerate() {
        *a *= if b & bit == 0 { d0 } else { d1 };
    }
}

/// Apply a 4x4 matrix on bits `(hi, lo)`; the local basis index is `2*b(hi) + b(lo)`.
pub(crate) fn apply_mat4(amps: &mut [Complex64], hi: usize, lo: usize, u: &Mat4, conj: bool) {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = maybe_conj(u[i][j], conj);
        }
    }
    let both = hi | lo;
    for b in 0..amps.len() {
        if b & both != 0 {
            continue;
        }
        let idx = [b, b | lo, b | hi, b | hi | lo];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &target) in idx.iter().enumerate() {
            amps[target] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
        }
    }
}

/// Controlled-Z on bits `a` and `b`.
pub(crate) fn apply_cz(amps: &mut [Complex64], a: usize, b: usize) {
    let both = a | b;
    for (k, v) in amps.iter_mut().enumerate() {
        if k & both == both {
            *v = -*v;
        }
    }
}

/// `exp(-i phi P)` for a Pauli string with flip mask `x`, or its conjugate.
pub(crate) fn apply_pauli_rotation(amps: &mut [Complex64], p: &PauliString, phi: f64, conj: bool) {
    let (s, c) = phi.sin_cos();
    let minus_is = maybe_conj(Complex64::new(0.0, -s), conj);
    if p.x == 0 {
        // Diagonal string: phase(b) is real (+-1) since there are no Y's.
        let plus = maybe_conj(Complex64::new(c, -s), conj);
        let minus = maybe_conj(Complex64::new(c, s), conj);
        for (b, a) in amps.iter_mut().enumerate() {
            *a *= if (b & p.z).count_ones() & 1 == 0 {
                plus
            } else {
                minus
            };
        }
        return;
    }
    let top = 1usize << (usize::BITS - 1 - p.x.leading_zeros());
    for b in 0..amps.len() {
        if b & top != 0 {
            continue;
        }
        let b2 = b ^ p.x;
        let a = amps[b];
        let a2 = amps[b2];
        // (P psi)[b2] = phase(b) psi[b]; (P psi)[b] = phase(b2) psi[b2]
        let ph_b = maybe_conj(p.phase_on(b), conj);
        let ph_b2 = maybe_conj(p.phase_on(b2), conj);
        amps[b] = a * c + minus_is * ph_b2 * a2;
        amps[b2] = a2 * c + minus_is * ph_b * a;
    }
}

/// `exp(-i phi X_a X_b)` on the bits in `mask` (two bits); conjugate flips the sign of phi.
pub(crate) fn apply_xx_rotation(amps: &mut [Complex64], mask: usize, phi: f64, conj: bool) {
    let (s, c) = phi.sin_cos();
    let m = maybe_conj(Complex64::new(0.0, -s), conj);
    let top = 1usize << (usize::BITS - 1 - mask.leading_zeros());
    for b in 0..amps.len() {
        if b & top != 0 {
            continue;
        }
        let b2 = b ^ mask;
        let a = amps[b];
        let a2 = amps[b2];
        amps[b] = a * c + m * a2;
        amps[b2] = a2 * c + m * a;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_are_unitary() {
        for t in [0.0, 0.3, 1.7, -2.2] {
            assert!(unitarity_defect(&rx(t)) < 1e-15);
            assert!(unitarity_defect(&ry(t)) < 1e-15);
            assert!(unitarity_defect(&rz(t)) < 1e-15);
            assert!(unitarity_defect(&xx_rotation(t)) < 1e-15);
        }
        assert!(unitarity_defect(&cz()) == 0.0);
    }

    #[test]
    fn non_unitary_rejected() {
        let mut u = identity2();
        u[0][0] = Complex64::new(1.1, 0.0);
        assert!(check_unitary(&u, 1e-12).is_err());
    }

    #[test]
    fn pauli_rotation_matches_matrix_kernel() {
        // exp(-i phi X X) via both kernels on a 3-qubit vector
        let mut a: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new(k as f64 * 0.1 + 0.05, 0.3 - k as f64 * 0.02))
            .collect();
        let mut b = a.clone();
        let p = PauliString::from_label("XIX").unwrap();
        apply_pauli_rotation(&mut a, &p, 0.37, false);
        apply_xx_rotation(&mut b, 0b101, 0.37, false);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-15);
        }
    }
}
