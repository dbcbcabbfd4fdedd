use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::vqe::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DepthResult {
    Reached(usize),
    NotReached,
}

impl fmt::Display for DepthResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepthResult::Reached(d) => write!(f, "{d}"),
            DepthResult::NotReached => f.write_str("NOT_REACHED"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    /// ansatz -> n -> smallest qualifying depth
    pub table: BTreeMap<String, BTreeMap<usize, DepthResult>>,
    /// Depths missing inside the covered range, as `(ansatz, n, depth)`.
    pub gaps: Vec<(String, usize, usize)>,
}

/// Smallest depth whose best-of-seeds fidelity `1 - infidelity` reaches `threshold`.
///
/// Records without metrics or flagged as failed are ignored.
pub fn min_depth_sweep(records: &[RunRecord], threshold: f64) -> SweepResult {
    // ansatz -> n -> depth -> best fidelity
    let mut best: BTreeMap<String, BTreeMap<usize, BTreeMap<usize, f64>>> = BTreeMap::new();
    for r in records {
        let Some(m) = r.metrics.as_ref().filter(|_| r.failed.is_none()) else {
            continue;
        };
        let f = 1.0 - m.infidelity;
        let e = best
            .entry(r.ansatz.clone())
            .or_default()
            .entry(r.n_qubits)
            .or_default()
            .entry(r.depth)
            .or_insert(f64::NEG_INFINITY);
        *e = e.max(f);
    }
    let mut out = SweepResult::default();
    for (ansatz, by_n) in best {
        let row = out.table.entry(ansatz.clone()).or_default();
        for (n, by_depth) in by_n {
            let (lo, hi) = (
                *by_depth.keys().next().unwrap(),
                *by_depth.keys().last().unwrap(),
            );
            for d in lo..=hi {
                if !by_depth.contains_key(&d) {
                    out.gaps.push((ansatz.clone(), n, d));
                }
            }
            let d_min = by_depth
                .iter()
                .find(|(_, &f)| f >= threshold)
                .map_or(DepthResult::NotReached, |(&d, _)| DepthResult::Reached(d));
            row.insert(n, d_min);
        }
    }
    for (a, n, d) in &out.gaps {
        log::warn!("depth sweep for {a} n={n} is missing depth {d}");
    }
    out
}
