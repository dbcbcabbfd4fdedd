//! Least-squares fit of `sum_l J_l e^{-r/L_l}` to a positive target on integer
//! distances, minimizing the relative residual.
//!
//! Candidate ranges come from a log-spaced grid with the amplitudes solved
//! linearly for each candidate set; the best few are then polished by
//! Levenberg-Marquardt over `(J, ln L)`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

const GRID_POINTS: usize = 48;
const MAX_COMBINATIONS: usize = 20_000;
const POLISH_STARTS: usize = 6;
const LM_ITERS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerlawFit {
    /// `(J_l, L_l)` sorted by `L_l` descending.
    pub terms: Vec<(f64, f64)>,
    /// `max_r |model(r)/target(r) - 1|`
    pub max_rel_residual: f64,
    /// `sum_r (model(r)/target(r) - 1)^2`
    pub sum_sq: f64,
}

impl PowerlawFit {
    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|&(j, l)| j * (-r / l).exp()).sum()
    }
}

/// Fit `1/r^alpha` on `r = 1..=r_max` with `n_exp` exponentials.
pub fn fit_powerlaw(alpha: f64, r_max: usize, n_exp: usize) -> Result<PowerlawFit> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", format!("{alpha} must be positive")));
    }
    let r: Vec<f64> = (1..=r_max).map(|k| k as f64).collect();
    let y: Vec<f64> = r.iter().map(|x| x.powf(-alpha)).collect();
    fit_exponentials(&r, &y, n_exp)
}

/// Fit an arbitrary positive target `y(r)`.
pub fn fit_exponentials(r: &[f64], y: &[f64], n_exp: usize) -> Result<PowerlawFit> {
    if n_exp < 1 {
        return Err(Error::invalid("n_exp", "need at least one exponential"));
    }
    if r.len() != y.len() || r.len() < n_exp + 1 {
        return Err(Error::invalid(
            "r_max",
            format!(
                "need at least {} distances for {n_exp} exponentials",
                n_exp + 1
            ),
        ));
    }
    if y.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::invalid("target", "must be positive and finite"));
    }
    let r_max = r.iter().cloned().fold(0.0, f64::max);
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|k| {
            let lo = (0.05f64).ln();
            let hi = (20.0 * r_max).ln();
            (lo + (hi - lo) * k as f64 / (GRID_POINTS - 1) as f64).exp()
        })
        .collect();

    let mut starts: Vec<(f64, Vec<f64>)> = Vec::new();
    for combo in combinations(GRID_POINTS, n_exp) {
        let ls: Vec<f64> = combo.iter().map(|&k| grid[k]).collect();
        if let Some((_, cost)) = solve_amplitudes(r, y, &ls) {
            starts.push((cost, ls));
        }
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for (_, ls) in starts.into_iter().take(POLISH_STARTS) {
        let (j, _) = solve_amplitudes(r, y, &ls).expect("start was solvable");
        let (j, l, cost) = levenberg_marquardt(r, y, j, ls);
        if cost.is_finite() && best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, j, l));
        }
    }
    let (sum_sq, j, l) = best.ok_or(Error::NoConvergence {
        what: "exponential fit",
        residual: f64::INFINITY,
    })?;
    let mut terms: Vec<(f64, f64)> = j.into_iter().zip(l).collect();
    terms.sort_by(|a, b| b.1.total_cmp(&a.1));
    let max_rel_residual = r
        .iter()
        .zip(y)
        .map(|(&x, &t)| {
            (terms.iter().map(|&(a, b)| a * (-x / b).exp()).sum::<f64>() / t - 1.0).abs()
        })
        .fold(0.0, f64::max);
    if !max_rel_residual.is_finite() || terms.iter().any(|&(a, b)| !a.is_finite() || !(b > 0.0)) {
        return Err(Error::NoConvergence {
            what: "exponential fit",
            residual: max_rel_residual,
        });
    }
    Ok(PowerlawFit {
        terms,
        max_rel_residual,
        sum_sq,
    })
}

/// Increasing index tuples of size `k` from `0..n`, capped at `MAX_COMBINATIONS`;
/// beyond the cap an evenly spread tuple is used.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        if out.len() >= MAX_COMBINATIONS {
            out.push((0..k).map(|i| i * (n - 1) / (k - 1).max(1)).collect());
            return out;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for t in i + 1..k {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Linear least squares for the amplitudes at fixed ranges.
fn solve_amplitudes(r: &[f64], y: &[f64], ls: &[f64]) -> Option<(Vec<f64>, f64)> {
    let a = DMatrix::from_fn(r.len(), ls.len(), |k, l| (-r[k] / ls[l]).exp() / y[k]);
    let b = DVector::from_element(r.len(), 1.0);
    let j = a.clone().svd(true, true).solve(&b, 1e-14).ok()?;
    let res = &a * &j - b;
    let cost = res.norm_squared();
    cost.is_finite()
        .then(|| (j.iter().copied().collect(), cost))
}

fn residuals(r: &[f64], y: &[f64], j: &[f64], u: &[f64]) -> DVector<f64> {
    DVector::from_fn(r.len(), |k, _| {
        let m: f64 = j
            .iter()
            .zip(u)
            .map(|(a, ul)| a * (-r[k] * (-ul).exp()).exp())
            .sum();
        m / y[k] - 1.0
    })
}

fn levenberg_marquardt(
    r: &[f64],
    y: &[f64],
    j0: Vec<f64>,
    l0: Vec<f64>,
) -> (Vec<f64>, Vec<f64>, f64) {
    let m = j0.len();
    let mut j = j0;
    let mut u: Vec<f64> = l0.iter().map(|l| l.ln()).collect();
    let mut res = residuals(r, y, &j, &u);
    let mut cost = res.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..LM_ITERS {
        let jac = DMatrix::from_fn(r.len(), 2 * m, |k, c| {
            let l = c % m;
            let e = (-r[k] * (-u[l]).exp()).exp() / y[k];
            if c < m {
                e
            } else {
                j[l] * e * r[k] * (-u[l]).exp()
            }
        });
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &res;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for d in 0..2 * m {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-300);
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    lambda *= 4.0;
                    continue;
                }
            };
            let jn: Vec<f64> = (0..m).map(|l| j[l] + step[l]).collect();
            let un: Vec<f64> = (0..m).map(|l| u[l] + step[m + l]).collect();
            let rn = residuals(r, y, &jn, &un);
            let cn = rn.norm_squared();
            if cn.is_finite() && cn < cost {
                let rel = (cost - cn) / cost.max(1e-300);
                j = jn;
                u = un;
                res = rn;
                cost = cn;
                lambda = (lambda / 3.0).max(1e-15);
                improved = rel > 1e-15;
                break;
            }
            lambda *= 4.0;
        }
        if !improved || cost < 1e-30 {
            break;
        }
    }
    let l = u.iter().map(|x| x.exp()).collect();
    (j, l, cost)
}
