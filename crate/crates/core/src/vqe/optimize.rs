use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    CircuitObjective, Failure, Objective, OptimizerConfig, RunRecord, Schedule, StepRecord,
};
use crate::ansatz::Circuit;
use crate::engine::PauliOperator;
use crate::hamiltonians::build_cost;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AdamResult {
    /// Best parameters seen, already clamped.
    pub params: Vec<f64>,
    pub energy: f64,
    /// Number of Adam updates taken.
    pub iterations: usize,
    pub converged: bool,
}

/// Adam on `obj` from `init`, keeping the best point seen.
pub fn adam_minimize<O: Objective + ?Sized>(
    obj: &O,
    init: &[f64],
    cfg: &OptimizerConfig,
) -> Result<AdamResult> {
    cfg.validate()?;
    if init.len() != obj.n_params() {
        return Err(Error::DimensionMismatch {
            expected: obj.n_params(),
            got: init.len(),
        });
    }
    let mut p = init.to_vec();
    obj.clamp(&mut p);
    let mut m = vec![0.0; p.len()];
    let mut v = vec![0.0; p.len()];
    let mut best = (f64::INFINITY, p.clone());
    let mut prev: Option<f64> = None;
    let mut converged = false;
    let mut iterations = 0;

    let eval = |p: &[f64], iteration: usize| -> Result<f64> {
        let c = obj.value(p)?;
        if c.is_nan() {
            return Err(Error::NanCost {
                iteration,
                params: p.to_vec(),
            });
        }
        Ok(c)
    };

    loop {
        let c = eval(&p, iterations)?;
        if c < best.0 {
            best = (c, p.clone());
        }
        if let Some(pc) = prev {
            if (c - pc).abs() < cfg.cost_tol {
                converged = true;
                break;
            }
        }
        if iterations == cfg.max_iters {
            break;
        }
        prev = Some(c);
        let g = obj.gradient(&p, cfg.grad_step)?;
        iterations += 1;
        let t = iterations as i32;
        let (c1, c2) = (1.0 - cfg.beta1.powi(t), 1.0 - cfg.beta2.powi(t));
        for k in 0..p.len() {
            m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
            v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
            let (mh, vh) = (m[k] / c1, v[k] / c2);
            p[k] = obj.clamp_coord(k, p[k] - cfg.learning_rate * mh / (vh.sqrt() + cfg.eps));
        }
    }
    Ok(AdamResult {
        params: best.1,
        energy: best.0,
        iterations,
        converged,
    })
}

/// Adiabatically assisted VQE: minimize `<(1-s) h0 + s htarget>` along the
/// schedule, each step warm-started from the previous optimum.
///
/// Failures inside a step are recorded on the returned record rather than
/// propagated; only malformed inputs return `Err`.
pub fn aavqe(
    h0: &PauliOperator,
    htarget: &PauliOperator,
    circuit: &Circuit,
    schedule: &Schedule,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<RunRecord> {
    let n = circuit.n_qubits;
    for h in [h0, htarget] {
        if h.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: h.n_qubits(),
            });
        }
    }
    cfg.validate()?;
    let points = schedule.points(n)?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial_params = circuit.initial_params(&mut rng);
    let initial = circuit.initial()?;

    let mut record = RunRecord {
        ansatz: circuit.name.clone(),
        depth: circuit.depth,
        n_qubits: n,
        model: None,
        seed,
        config_hash: None,
        initial_params: initial_params.clone(),
        steps: Vec::with_capacity(points.len()),
        metrics: None,
        failed: None,
        wall_time_s: 0.0,
    };
    let mut params = initial_params;
    for s in points {
        let step = build_cost(s, h0, htarget).and_then(|h| {
            let obj = CircuitObjective::new(circuit, &h, initial.clone());
            adam_minimize(&obj, &params, cfg)
        });
        match step {
            Ok(res) => {
                log::debug!(
                    "{} s={s:.4} E={:.10} iters={}",
                    circuit.name,
                    res.energy,
                    res.iterations
                );
                record.steps.push(StepRecord {
                    s,
                    start_params: std::mem::replace(&mut params, res.params.clone()),
                    params: res.params,
                    energy: res.energy,
                    iterations: res.iterations,
                    converged: res.converged,
                });
            }
            Err(e) => {
                log::warn!("{} failed at s={s}: {e}", circuit.name);
                record.failed = Some(Failure {
                    s,
                    message: e.to_string(),
                });
                break;
            }
        }
    }
    record.wall_time_s = start.elapsed().as_secs_f64();
    Ok(record)
}
