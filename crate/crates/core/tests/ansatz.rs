mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wqed::ansatz::*;
use wqed::engine::{PauliOperator, StateVector};

fn fidelity(a: &StateVector, b: &StateVector) -> f64 {
    a.overlap(b).unwrap()
}

fn random_params(c: &Circuit, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..c.n_params)
        .map(|_| rng.random_range(-1.5..1.5))
        .collect()
}

fn all_ansatze(n: usize, depth: usize) -> Vec<Circuit> {
    let mut v = vec![
        build_wqed_ansatz(WqedVariant::Xx, n, depth, false).unwrap(),
        build_wqed_ansatz(WqedVariant::I, n, depth, true).unwrap(),
        build_all_to_all(WqedVariant::I, n, depth, true).unwrap(),
        build_hea(n, depth).unwrap(),
        build_brick_layer(n, depth).unwrap(),
        build_hva(HvaModel::Tfim, n, depth).unwrap(),
    ];
    if n >= 4 {
        v.push(build_powerlaw_wqed(n, depth, 1.0, 2).unwrap());
        v.push(build_powerlaw_wqed_frozen(n, depth, 1.0, 2).unwrap());
    }
    if n % 2 == 0 {
        v.push(build_hva(HvaModel::Xxz, n, depth).unwrap());
    }
    v
}

#[test]
fn parameter_counts() {
    assert_eq!(
        build_wqed_ansatz(WqedVariant::I, 16, 5, true)
            .unwrap()
            .n_params,
        15
    );
    assert_eq!(
        build_wqed_ansatz(WqedVariant::Xx, 10, 3, false)
            .unwrap()
            .n_params,
        36
    );
    assert_eq!(build_powerlaw_wqed(10, 4, 1.0, 2).unwrap().n_params, 20);
    let hea = build_hea(4, 2).unwrap();
    assert_eq!(hea.n_params, 24);
    assert_eq!(hea.count_gates(|k| *k == GateKind::Cz), 8);
    let brick = build_brick_layer(4, 1).unwrap();
    assert_eq!(brick.n_params, 12);
    assert_eq!(brick.count_gates(|k| *k == GateKind::Cz), 4);
    assert_eq!(build_hva(HvaModel::Tfim, 16, 5).unwrap().n_params, 10);
    assert_eq!(build_hva(HvaModel::Xxz, 10, 4).unwrap().n_params, 24);
    assert!(build_hva(HvaModel::Xxz, 5, 1).is_err());
    assert!(build_hea(4, 0).is_err());
}

#[test]
fn zero_parameters_are_identity() {
    for n in [2, 3, 4, 5] {
        for c in all_ansatze(n, 2) {
            let psi0 = c.initial().unwrap();
            let out = apply_circuit(&c, &vec![0.0; c.n_params], &psi0).unwrap();
            assert!(
                (fidelity(&out, &psi0) - 1.0).abs() < 1e-10,
                "{} n={n}",
                c.name
            );
        }
    }
    let hea = build_hea(4, 3).unwrap();
    let z = StateVector::zero(4).unwrap();
    let out = apply_circuit(&hea, &[0.0; 36], &z).unwrap();
    assert!(max_diff(out.amplitudes(), z.amplitudes()) < 1e-15);
}

#[test]
fn hva_tfim_zero_params_energy() {
    let c = build_hva(HvaModel::Tfim, 6, 2).unwrap();
    let psi = apply_circuit(&c, &[0.0; 4], &c.initial().unwrap()).unwrap();
    let hz = wqed::hamiltonians::total_z(6).unwrap();
    assert!((psi.expectation(&hz).unwrap() + 6.0).abs() < 1e-12);
}

#[test]
fn wqed_i_single_layer_matches_dense_expm() {
    let c = build_wqed_ansatz(WqedVariant::I, 2, 1, true).unwrap();
    let psi0 = c.initial().unwrap();
    let out = apply_circuit(&c, &[0.3, 1.0, 0.0], &psi0).unwrap();
    let w = 2.0 * (-1.0f64).exp();
    let h = dense_sum(&[(w, "XX".to_string())]);
    let want = apply(&expm(&h, 0.3), psi0.amplitudes());
    assert!(max_diff(out.amplitudes(), &want) < 1e-10);
}

#[test]
fn wqed_i_pairwise_equals_krylov() {
    for n in [4, 6, 8] {
        let c = build_wqed_ansatz(WqedVariant::I, n, 1, true).unwrap();
        let p = [0.41, 1.7, 0.0];
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let psi0 = StateVector::haar_random(n, &mut rng).unwrap();
        let pairwise = apply_circuit(&c, &p, &psi0).unwrap();
        let h = gate_generator(n, &c.gates[0], &p).unwrap().unwrap();
        let mut kr = psi0.clone();
        kr.expm_apply(&h, 0.41, 1e-12).unwrap();
        assert!(max_diff(pairwise.amplitudes(), kr.amplitudes()) < 1e-10);
    }
}

#[test]
fn wqed_xx_gate_matches_dense() {
    let n = 4;
    let c = build_wqed_ansatz(WqedVariant::Xx, n, 1, false).unwrap();
    let (t, l) = (0.8, 1.6);
    let mut p = vec![t, l];
    p.extend([0.0; 4]);
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = 0.5 * (-((j - i) as f64) / l).exp();
            terms.push((w, label(n, &[(i, 'X'), (j, 'X')])));
            terms.push((w, label(n, &[(i, 'Y'), (j, 'Y')])));
        }
    }
    let psi0 = StateVector::from_bits(&[false, true, false, true]).unwrap();
    let want = apply(&expm(&dense_sum(&terms), t), psi0.amplitudes());
    let got = apply_circuit(&c, &p, &psi0).unwrap();
    assert!(max_diff(got.amplitudes(), &want) < 1e-10);
}

fn rot(axis: char, theta: f64) -> DMatrix<C> {
    let p = kron_label(&axis.to_string());
    let i = kron_label("I");
    i * c(theta.cos()) - p * C::new(0.0, theta.sin())
}

fn embed(n: usize, q: usize, m: &DMatrix<C>) -> DMatrix<C> {
    let mut out = DMatrix::from_element(1, 1, c(1.0));
    for k in 0..n {
        out = if k == q {
            out.kronecker(m)
        } else {
            out.kronecker(&kron_label("I"))
        };
    }
    out
}

fn cz_dense(n: usize, a: usize, b: usize) -> DMatrix<C> {
    let d = 1 << n;
    DMatrix::from_fn(d, d, |i, j| {
        if i != j {
            c(0.0)
        } else if (i >> (n - 1 - a)) & 1 == 1 && (i >> (n - 1 - b)) & 1 == 1 {
            c(-1.0)
        } else {
            c(1.0)
        }
    })
}

/// Dense unitary of HEA / brick-layer circuits assembled from Kronecker products.
fn dense_unitary(circ: &Circuit, p: &[f64]) -> DMatrix<C> {
    let n = circ.n_qubits;
    let mut u = DMatrix::<C>::identity(1 << n, 1 << n);
    for g in &circ.gates {
        let m = match g.kind {
            GateKind::RotX => embed(n, g.qubits[0], &rot('X', p[g.slots[0]])),
            GateKind::RotY => embed(n, g.qubits[0], &rot('Y', p[g.slots[0]])),
            GateKind::RotZ => embed(n, g.qubits[0], &rot('Z', p[g.slots[0]])),
            GateKind::Cz => cz_dense(n, g.qubits[0], g.qubits[1]),
            _ => unreachable!(),
        };
        u = m * u;
    }
    u
}

#[test]
fn hea_and_brick_match_dense_composition() {
    for n in [2, 3, 4, 5] {
        for c in [build_hea(n, 2).unwrap(), build_brick_layer(n, 2).unwrap()] {
            let p = random_params(&c, 7);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let psi0 = StateVector::haar_random(n, &mut rng).unwrap();
            let want = apply(&dense_unitary(&c, &p), psi0.amplitudes());
            let got = apply_circuit(&c, &p, &psi0).unwrap();
            assert!(
                max_diff(got.amplitudes(), &want) < 1e-10,
                "{} n={n}",
                c.name
            );
        }
    }
}

#[test]
fn hva_xxz_layer_matches_dense() {
    let n = 4;
    let c = build_hva(HvaModel::Xxz, n, 1).unwrap();
    let p = random_params(&c, 3);
    let psi0 = c.initial().unwrap();
    let mut v = psi0.amplitudes().to_vec();
    // odd links (1,2), (3,0) then even links (0,1), (2,3); x, y, z each
    let sets = [[(1, 2), (3, 0)], [(0, 1), (2, 3)]];
    let mut k = 0;
    for set in sets {
        for a in ['X', 'Y', 'Z'] {
            let t: Vec<(f64, String)> = set
                .iter()
                .map(|&(i, j)| (1.0, label(n, &[(i, a), (j, a)])))
                .collect();
            v = apply(&expm(&dense_sum(&t), p[k]), &v);
            k += 1;
        }
    }
    let got = apply_circuit(&c, &p, &psi0).unwrap();
    assert!(max_diff(got.amplitudes(), &v) < 1e-10);
    let h = 1.0 / 2f64.sqrt();
    let bell = psi0.amplitudes();
    assert!((bell[0].re - 0.5).abs() < 1e-15 && (bell[0b0011].re + 0.5).abs() < 1e-15);
    assert!((bell[0b1111].re - 0.5).abs() < 1e-15 && h > 0.0);
}

#[test]
fn hva_tfim_preserves_parity() {
    let n = 6;
    let c = build_hva(HvaModel::Tfim, n, 3).unwrap();
    let parity = PauliOperator::from_labels(&[(1.0, "ZZZZZZ")]).unwrap();
    let psi0 = c.initial().unwrap();
    let p0 = psi0.expectation(&parity).unwrap();
    for seed in 0..5 {
        let out = apply_circuit(&c, &random_params(&c, seed), &psi0).unwrap();
        assert!((out.expectation(&parity).unwrap() - p0).abs() < 1e-10);
    }
}

#[test]
fn circuits_are_deterministic() {
    for c in all_ansatze(5, 2) {
        let p = random_params(&c, 1);
        let psi0 = c.initial().unwrap();
        let a = apply_circuit(&c, &p, &psi0).unwrap();
        let b = apply_circuit(&c, &p, &psi0).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn range_parameters_are_clamped() {
    let c = build_wqed_ansatz(WqedVariant::Xx, 3, 1, false).unwrap();
    let psi0 = StateVector::from_bits(&[false, true, false]).unwrap();
    let a = apply_circuit(&c, &[0.5, -4.0, 0.1, 0.2, 0.3], &psi0).unwrap();
    let b = apply_circuit(&c, &[0.5, 1e-3, 0.1, 0.2, 0.3], &psi0).unwrap();
    assert_eq!(a, b);
    assert!(apply_circuit(&c, &[0.5], &psi0).is_err());
}

#[test]
fn powerlaw_structure_and_initialization() {
    let one = build_powerlaw_wqed(8, 3, 1.0, 1).unwrap();
    let plain = build_wqed_ansatz(WqedVariant::I, 8, 3, true).unwrap();
    assert_eq!(one.gates, plain.gates);
    assert_eq!(one.range_slots, plain.range_slots);

    let n = 10;
    let alpha = 1.0;
    let c = build_powerlaw_wqed(n, 2, alpha, 2).unwrap();
    let fit = fit_powerlaw(alpha, n - 1, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = c.initial_params(&mut rng);
    // Layer 0 slots: T1, L1, T2, L2, theta
    let tau = p[0] / fit.terms[0].0;
    assert!((p[2] / fit.terms[1].0 - tau).abs() < 1e-12);
    for r in 1..n {
        let model: f64 = [(p[0], p[1]), (p[2], p[3])]
            .iter()
            .map(|&(t, l)| t / tau * (-(r as f64) / l).exp())
            .sum();
        let target = (r as f64).powf(-alpha);
        assert!((model / target - 1.0).abs() <= fit.max_rel_residual + 1e-12);
    }
}

/// Grid over `(ln L1, ln L2)` with linear amplitudes, then shrinking local refinement.
fn grid_oracle(alpha: f64, r_max: usize) -> f64 {
    let r: Vec<f64> = (1..=r_max).map(|k| k as f64).collect();
    let y: Vec<f64> = r.iter().map(|x| x.powf(-alpha)).collect();
    let eval = |l1: f64, l2: f64| -> (f64, f64) {
        let a = DMatrix::from_fn(r.len(), 2, |k, c| (-r[k] / [l1, l2][c]).exp() / y[k]);
        let b = nalgebra::DVector::from_element(r.len(), 1.0);
        let Ok(j) = a.clone().svd(true, true).solve(&b, 1e-14) else {
            return (f64::INFINITY, f64::INFINITY);
        };
        let res = &a * &j - b;
        (res.norm_squared(), res.amax())
    };
    let (mut best, mut bl) = (f64::INFINITY, (0.0, 0.0));
    for a in 0..120 {
        for b in a + 1..120 {
            let l1 = (0.02f64.ln() + a as f64 * 0.06).exp();
            let l2 = (0.02f64.ln() + b as f64 * 0.06).exp();
            let (s, _) = eval(l1, l2);
            if s < best {
                best = s;
                bl = (l1.ln(), l2.ln());
            }
        }
    }
    let mut h = 0.06;
    while h > 1e-7 {
        let mut moved = false;
        for (da, db) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let (s, _) = eval((bl.0 + da).exp(), (bl.1 + db).exp());
            if s < best {
                best = s;
                bl = (bl.0 + da, bl.1 + db);
                moved = true;
            }
        }
        if !moved {
            h /= 2.0;
        }
    }
    eval(bl.0.exp(), bl.1.exp()).1
}

#[test]
fn powerlaw_fit_beats_grid_oracle() {
    let fit = fit_powerlaw(1.0, 13, 2).unwrap();
    let oracle = grid_oracle(1.0, 13);
    assert!(
        fit.max_rel_residual <= 1.05 * oracle,
        "{} vs {oracle}",
        fit.max_rel_residual
    );
    assert!(fit.terms[0].1 >= fit.terms[1].1);
    let one = fit_powerlaw(3.0, 13, 1).unwrap();
    let two = fit_powerlaw(3.0, 13, 2).unwrap();
    assert!(two.sum_sq <= one.sum_sq);
    assert!(two.max_rel_residual <= one.max_rel_residual);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn count_formulas(n in 2usize..12, d in 1usize..6) {
        prop_assert_eq!(build_wqed_ansatz(WqedVariant::Xx, n, d, false).unwrap().n_params, d * (n + 2));
        prop_assert_eq!(build_wqed_ansatz(WqedVariant::I, n, d, true).unwrap().n_params, 3 * d);
        prop_assert_eq!(build_hea(n, d).unwrap().n_params, 3 * n * d);
        prop_assert_eq!(build_brick_layer(n, d).unwrap().n_params, 2 * n * d + n);
        prop_assert_eq!(build_hva(HvaModel::Tfim, n, d).unwrap().n_params, 2 * d);
        if n % 2 == 0 {
            prop_assert_eq!(build_hva(HvaModel::Xxz, n, d).unwrap().n_params, 6 * d);
        }
        if n >= 4 {
            prop_assert_eq!(build_powerlaw_wqed(n, d, 1.5, 2).unwrap().n_params, 5 * d);
        }
    }

    #[test]
    fn circuits_preserve_norm(seed in 0u64..1000, n in 2usize..6) {
        for c in all_ansatze(n, 2) {
            let out = apply_circuit(&c, &random_params(&c, seed), &c.initial().unwrap()).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-10);
        }
    }
}
