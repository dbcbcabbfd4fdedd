//! Exact `exp(-i t H)` for translation-invariant flip-flop generators
//! `H = sum_{i<j} (w_{j-i}/2) (X_i X_j + Y_i Y_j)`.
//!
//! `H` conserves the number of excitations and is real in the computational
//! basis, so it splits into real symmetric blocks, one per Hamming weight.
//! Block eigendecompositions are cached per thread by `(n, w)`.

use std::cell::RefCell;
use std::rc::Rc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

const CACHE_SIZE: usize = 64;

struct Block {
    states: Vec<usize>,
    vectors: DMatrix<f64>,
    values: Vec<f64>,
}

struct Decomposition {
    blocks: Vec<Block>,
}

type Key = (usize, Vec<u64>);

thread_local! {
    static CACHE: RefCell<Vec<(Key, Rc<Decomposition>)>> = const { RefCell::new(Vec::new()) };
}

fn decompose(n: usize, w: &[f64]) -> Decomposition {
    let dim = 1usize << n;
    let mut by_weight: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut pos = vec![0usize; dim];
    for b in 0..dim {
        let k = b.count_ones() as usize;
        pos[b] = by_weight[k].len();
        by_weight[k].push(b);
    }
    let blocks = by_weight
        .into_iter()
        .map(|states| {
            let d = states.len();
            let mut m = DMatrix::<f64>::zeros(d, d);
            for (a, &b) in states.iter().enumerate() {
                for i in 0..n {
                    for j in i + 1..n {
                        let wr = w[j - i - 1];
                        let (mi, mj) = (1 << (n - 1 - i), 1 << (n - 1 - j));
                        if wr != 0.0 && ((b & mi) == 0) != ((b & mj) == 0) {
                            m[(pos[b ^ mi ^ mj], a)] += wr;
                        }
                    }
                }
            }
            let eig = SymmetricEigen::new(m);
            Block {
                states,
                vectors: eig.eigenvectors,
                values: eig.eigenvalues.iter().copied().collect(),
            }
        })
        .collect();
    Decomposition { blocks }
}

fn cached(n: usize, w: &[f64]) -> Rc<Decomposition> {
    let key: Key = (n, w.iter().map(|x| x.to_bits()).collect());
    CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if let Some(i) = c.iter().position(|(k, _)| *k == key) {
            let hit = c.remove(i);
            let d = hit.1.clone();
            c.push(hit);
            return d;
        }
        let d = Rc::new(decompose(n, w));
        if c.len() == CACHE_SIZE {
            c.remove(0);
        }
        c.push((key, d.clone()));
        d
    })
}

/// Overwrite `amps` (qubit 0 most significant) with `exp(-i t H) amps`;
/// `w[r - 1]` is the weight at distance `r`.
pub fn apply(amps: &mut [Complex64], n: usize, w: &[f64], t: f64) -> Result<()> {
    if amps.len() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            got: amps.len(),
        });
    }
    if w.len() + 1 != n.max(1) {
        return Err(Error::DimensionMismatch {
            expected: n.saturating_sub(1),
            got: w.len(),
        });
    }
    if !t.is_finite() || w.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("t", "time and weights must be finite"));
    }
    if t == 0.0 || w.iter().all(|&x| x == 0.0) {
        return Ok(());
    }
    let dec = cached(n, w);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for blk in &dec.blocks {
        let d = blk.states.len();
        if d == 1 {
            // a single state in the block is annihilated by H
            continue;
        }
        x.clear();
        x.extend(blk.states.iter().map(|&b| amps[b]));
        y.clear();
        for k in 0..d {
            let col = blk.vectors.column(k);
            let mut s = Complex64::new(0.0, 0.0);
            for (v, xi) in col.iter().zip(&x) {
                s += xi * *v;
            }
            y.push(s * Complex64::from_polar(1.0, -t * blk.values[k]));
        }
        for (a, &b) in blk.states.iter().enumerate() {
            let row = blk.vectors.row(a);
            let mut s = Complex64::new(0.0, 0.0);
            for (v, yk) in row.iter().zip(&y) {
                s += yk * *v;
            }
            amps[b] = s;
        }
    }
    Ok(())
}
