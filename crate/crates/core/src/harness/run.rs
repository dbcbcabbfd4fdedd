use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Problem, SCHEMA_VERSION};
use super::io::{read_records, write_atomic};
use crate::analysis::{entanglement_spectrum, GroundReference};
use crate::engine::DensityMatrix;
use crate::noise::{noisy_apply_circuit_with_limit, noisy_vqe_with_limit, NoiseModel};
use crate::vqe::{aavqe, Failure, RunRecord};
use crate::{Error, Result};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "WQED_WORKERS";

/// One line of a record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordLine {
    pub schema_version: u32,
    /// Noise label for the noisy follow-up run, absent for noiseless runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<String>,
    pub record: RunRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RunKey {
    pub ansatz: String,
    pub n: usize,
    pub depth: usize,
    pub seed: u64,
}

impl RunKey {
    pub fn file_name(&self) -> String {
        format!(
            "{}_n{}_d{}_s{}.jsonl",
            self.ansatz, self.n, self.depth, self.seed
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Computed,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub ansatz: String,
    pub n_qubits: usize,
    pub depth: usize,
    pub seed: u64,
    pub status: RunStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub config_hash: String,
    pub code_version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub workers: usize,
    pub computed: usize,
    pub skipped: usize,
    pub failed: usize,
    pub records: Vec<ManifestEntry>,
    #[serde(default)]
    pub spectra: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub schema_version: u32,
    pub ansatz: String,
    pub n_qubits: usize,
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    pub ks: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub force: bool,
    /// Overrides both the environment and the default.
    pub workers: Option<usize>,
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Workers: explicit option, then the environment, then available parallelism.
pub fn worker_count(opt: Option<usize>) -> usize {
    opt.or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()))
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1)
}

/// Rough peak bytes of one run at `n` qubits.
fn run_footprint(n: usize, noisy: bool) -> u64 {
    let dim = 1u64 << n;
    let pure = 16 * dim * 8;
    if noisy {
        pure + 16 * dim * dim * 4
    } else {
        pure
    }
}

struct Shared {
    cfg: ExperimentConfig,
    hash: String,
    noise: Option<(String, NoiseModel)>,
    problems: BTreeMap<usize, (Problem, GroundReference)>,
}

/// Run every `(ansatz, n, depth, seed)` of the config and write records,
/// `summary.csv` and `manifest.json` under the output directory.
pub fn run_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Manifest> {
    cfg.validate()?;
    let started = now();
    let out = cfg.output_dir.clone();
    fs::create_dir_all(out.join("records"))?;
    let hash = cfg.hash();
    let noise = cfg.noise()?;
    let max_n = *cfg.qubits.iter().max().expect("validated");
    let mut workers = worker_count(opts.workers);
    if let Some(mb) = cfg.memory_budget_mb {
        let per_run = run_footprint(max_n, noise.is_some());
        let fit = ((mb << 20) / per_run.max(1)).max(1) as usize;
        if fit < workers {
            log::info!("memory budget {mb} MB allows {fit} concurrent runs");
            workers = fit;
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let mut keys = Vec::new();
    for a in &cfg.ansatz {
        for &n in &cfg.qubits {
            for depth in a.depth_range() {
                for &seed in &cfg.seeds {
                    keys.push((
                        a.clone(),
                        RunKey {
                            ansatz: a.id(),
                            n,
                            depth,
                            seed,
                        },
                    ));
                }
            }
        }
    }
    keys.sort_by(|a, b| a.1.cmp(&b.1));

    let mut entries = Vec::new();
    let (mut computed, mut skipped, mut failed) = (0, 0, 0);
    let mut spectra = Vec::new();

    if cfg.vqe {
        let mut pending = Vec::new();
        for (spec, key) in &keys {
            let path = out.join("records").join(key.file_name());
            if !opts.force && is_complete(&path, &hash, noise.is_some()) {
                skipped += 1;
                entries.push(entry(key, RunStatus::Skipped));
            } else {
                pending.push((spec.clone(), key.clone(), path));
            }
        }
        let mut problems = BTreeMap::new();
        for n in pending
            .iter()
            .map(|p| p.1.n)
            .collect::<std::collections::BTreeSet<_>>()
        {
            let p = cfg.model.problem(n, &cfg.schedule)?;
            let r = GroundReference::new(&p.scored)?;
            problems.insert(n, (p, r));
        }
        let shared = Arc::new(Shared {
            cfg: cfg.clone(),
            hash: hash.clone(),
            noise: noise.clone(),
            problems,
        });
        log::info!(
            "{} runs pending, {} skipped, {workers} workers",
            pending.len(),
            skipped
        );
        let results: Vec<(RunKey, RunStatus)> = pool.install(|| {
            pending
                .par_iter()
                .map(|(spec, key, path)| {
                    let lines = execute(&shared, spec, key);
                    let ok = lines.iter().all(|l| l.record.failed.is_none());
                    let status = match write_lines(path, &lines) {
                        Ok(()) if ok => RunStatus::Computed,
                        Ok(()) => RunStatus::Failed,
                        Err(e) => {
                            log::error!("writing {}: {e}", path.display());
                            RunStatus::Failed
                        }
                    };
                    (key.clone(), status)
                })
                .collect()
        });
        for (key, status) in results {
            match status {
                RunStatus::Computed => computed += 1,
                RunStatus::Failed => failed += 1,
                RunStatus::Skipped => {}
            }
            entries.push(entry(&key, status));
        }
        entries.sort_by(|a, b| {
            (&a.ansatz, a.n_qubits, a.depth, a.seed).cmp(&(&b.ansatz, b.n_qubits, b.depth, b.seed))
        });
        write_summary(&out, &keys.iter().map(|k| k.1.clone()).collect::<Vec<_>>())?;
    }

    if let Some(sc) = cfg.spectrum {
        fs::create_dir_all(out.join("spectra"))?;
        let mut seen = std::collections::BTreeSet::new();
        for (spec, key) in &keys {
            if !seen.insert((key.ansatz.clone(), key.n, key.depth)) {
                continue;
            }
            let name = format!("{}_n{}_d{}.json", key.ansatz, key.n, key.depth);
            let path = out.join("spectra").join(&name);
            if opts.force || !path.exists() {
                let problem_start = cfg.model.problem(key.n, &cfg.schedule)?.initial_state;
                let circ = spec.build(key.n, key.depth, &cfg.model, problem_start)?;
                let es = pool.install(|| entanglement_spectrum(&circ, sc.samples, sc.seed))?;
                let rec = SpectrumRecord {
                    schema_version: SCHEMA_VERSION,
                    ansatz: key.ansatz.clone(),
                    n_qubits: key.n,
                    depth: key.depth,
                    samples: sc.samples,
                    seed: sc.seed,
                    ks: es.ks,
                };
                write_atomic(&path, serde_json::to_string_pretty(&rec)?.as_bytes())?;
            }
            spectra.push(format!("spectra/{name}"));
        }
    }

    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        config_hash: hash,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started,
        finished_unix: now(),
        workers,
        computed,
        skipped,
        failed,
        records: entries,
        spectra,
    };
    write_atomic(
        &out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?.as_bytes(),
    )?;
    write_atomic(&out.join("config.toml"), cfg.to_toml()?.as_bytes())?;
    Ok(manifest)
}

fn entry(key: &RunKey, status: RunStatus) -> ManifestEntry {
    ManifestEntry {
        file: format!("records/{}", key.file_name()),
        ansatz: key.ansatz.clone(),
        n_qubits: key.n,
        depth: key.depth,
        seed: key.seed,
        status,
    }
}

/// A record file counts as done when it parses, matches the config hash and
/// holds no failure.
fn is_complete(path: &Path, hash: &str, noisy: bool) -> bool {
    match read_records(path) {
        Ok(lines) => {
            lines.len() == 1 + usize::from(noisy)
                && lines.iter().all(|l| {
                    l.record.config_hash.as_deref() == Some(hash) && l.record.failed.is_none()
                })
        }
        Err(_) => false,
    }
}

fn write_lines(path: &Path, lines: &[RecordLine]) -> Result<()> {
    let mut text = String::new();
    for l in lines {
        text.push_str(&serde_json::to_string(l)?);
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

fn failed_record(key: &RunKey, shared: &Shared, msg: String) -> RunRecord {
    RunRecord {
        ansatz: key.ansatz.clone(),
        depth: key.depth,
        n_qubits: key.n,
        model: shared.problems.get(&key.n).map(|p| p.0.spec),
        seed: key.seed,
        config_hash: Some(shared.hash.clone()),
        initial_params: vec![],
        steps: vec![],
        metrics: None,
        failed: Some(Failure {
            s: 0.0,
            message: msg,
        }),
        wall_time_s: 0.0,
    }
}

fn execute(shared: &Shared, spec: &super::config::AnsatzSpec, key: &RunKey) -> Vec<RecordLine> {
    let line = |noise: Option<String>, record| RecordLine {
        schema_version: SCHEMA_VERSION,
        noise,
        record,
    };
    match execute_inner(shared, spec, key) {
        Ok(lines) => lines,
        Err(e) => {
            log::error!("{} failed: {e}", key.file_name());
            vec![line(None, failed_record(key, shared, e.to_string()))]
        }
    }
}

fn execute_inner(
    shared: &Shared,
    spec: &super::config::AnsatzSpec,
    key: &RunKey,
) -> Result<Vec<RecordLine>> {
    let cfg = &shared.cfg;
    let (problem, reference) = &shared.problems[&key.n];
    let circ = spec.build(key.n, key.depth, &cfg.model, problem.initial_state)?;
    let mut rec = aavqe(
        &problem.h0,
        &problem.htarget,
        &circ,
        &problem.schedule,
        &cfg.optimizer,
        key.seed,
    )?;
    rec.model = Some(problem.spec);
    rec.config_hash = Some(shared.hash.clone());
    if rec.failed.is_none() {
        // The last schedule point is the scored Hamiltonian; report its energy.
        reference.score_record(&mut rec, &circ)?;
    }
    let mut lines = vec![RecordLine {
        schema_version: SCHEMA_VERSION,
        noise: None,
        record: rec.clone(),
    }];
    if let Some((label, model)) = &shared.noise {
        let mut noisy = if rec.failed.is_none() {
            match noisy_run(shared, &circ, problem, reference, &rec, *model) {
                Ok(r) => r,
                Err(e) => failed_record(key, shared, format!("noisy run: {e}")),
            }
        } else {
            failed_record(key, shared, "noiseless run failed".into())
        };
        noisy.config_hash = Some(shared.hash.clone());
        lines.push(RecordLine {
            schema_version: SCHEMA_VERSION,
            noise: Some(label.clone()),
            record: noisy,
        });
    }
    Ok(lines)
}

fn noisy_run(
    shared: &Shared,
    circ: &crate::ansatz::Circuit,
    problem: &Problem,
    reference: &GroundReference,
    clean: &RunRecord,
    noise: NoiseModel,
) -> Result<RunRecord> {
    let cfg = &shared.cfg;
    let limit = cfg.max_noisy_qubits;
    let mut rec = noisy_vqe_with_limit(&problem.scored, circ, clean, noise, &cfg.optimizer, limit)?;
    let p = rec.final_params().expect("one step").to_vec();
    let rho0 = DensityMatrix::from_pure(&circ.initial()?)?;
    let out = noisy_apply_circuit_with_limit(circ, &p, noise, &rho0, limit)?;
    rec.metrics = Some(reference.mixed_metrics(out.rho(), rec.final_energy().expect("one step"))?);
    Ok(rec)
}

/// Summary columns, in order.
pub const SUMMARY_HEADER: [&str; 15] = [
    "ansatz",
    "n_qubits",
    "depth",
    "seed",
    "noise",
    "energy",
    "e_gs",
    "e_max",
    "infidelity",
    "residual_energy",
    "residual_clipped",
    "ground_degeneracy",
    "iterations",
    "steps",
    "failed",
];

/// `summary.csv` over the given keys in key order; wall times are left out so
/// identical runs give identical bytes.
pub fn write_summary(out: &Path, keys: &[RunKey]) -> Result<PathBuf> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
    for key in keys {
        let path = out.join("records").join(key.file_name());
        let lines = match read_records(&path) {
            Ok(l) => l,
            Err(e) => {
                log::warn!("summary: skipping {}: {e}", path.display());
                continue;
            }
        };
        for l in lines {
            let r = &l.record;
            let m = r.metrics.as_ref();
            let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let row = [
                r.ansatz.clone(),
                r.n_qubits.to_string(),
                r.depth.to_string(),
                r.seed.to_string(),
                l.noise.clone().unwrap_or_default(),
                f(m.map(|m| m.energy)),
                f(m.map(|m| m.e_gs)),
                f(m.map(|m| m.e_max)),
                f(m.map(|m| m.infidelity)),
                f(m.map(|m| m.residual_energy)),
                m.map(|m| m.residual_clipped.to_string())
                    .unwrap_or_default(),
                m.map(|m| m.ground_degeneracy.to_string())
                    .unwrap_or_default(),
                r.steps
                    .iter()
                    .map(|s| s.iterations)
                    .sum::<usize>()
                    .to_string(),
                r.steps.len().to_string(),
                r.failed
                    .as_ref()
                    .map(|f| f.message.clone())
                    .unwrap_or_default(),
            ];
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    let path = out.join("summary.csv");
    write_atomic(&path, &bytes)?;
    Ok(path)
}
