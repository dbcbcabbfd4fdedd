use std::f64::consts::FRAC_PI_2;

use super::spectrum::ground_space;
use super::{build_lrtfim, Boundary};
use crate::engine::PauliOperator;
use crate::{Error, Result};

/// Ground energy and the gap to the first level above the ground manifold.
pub fn gap_above_ground(h: &PauliOperator) -> Result<(f64, f64)> {
    let s = ground_space(h, 1)?;
    let gap = s
        .gap()
        .ok_or_else(|| Error::invalid("h", "spectrum has a single level"))?;
    Ok((s.ground_energy(), gap))
}

/// Smallest `theta` on the grid `0, grid, 2 grid, ...` (up to pi/2) where the
/// long-range TFIM gap drops below `1/n^2`.
///
/// When the criterion is never met the error carries the grid point with the
/// smallest gap so callers can fall back to it.
pub fn critical_theta(n: usize, alpha: f64, grid: f64) -> Result<f64> {
    if !(grid > 0.0 && grid.is_finite()) {
        return Err(Error::invalid("grid", format!("{grid} must be positive")));
    }
    let threshold = 1.0 / (n * n) as f64;
    let steps = (FRAC_PI_2 / grid).floor() as usize;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=steps + 1 {
        let theta = (k as f64 * grid).min(FRAC_PI_2);
        let h = build_lrtfim(n, alpha, theta, Boundary::Open)?;
        let (_, gap) = gap_above_ground(&h)?;
        if gap < threshold {
            return Ok(theta);
        }
        if gap < best.0 {
            best = (gap, theta);
        }
        if theta >= FRAC_PI_2 {
            break;
        }
    }
    Err(Error::GapCriterionNotMet {
        min_gap: best.0,
        theta_at_min: best.1,
    })
}
