use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::io::{read_records, write_atomic};
use super::run::{RecordLine, SpectrumRecord};
use crate::analysis::min_depth_sweep;
use crate::hamiltonians::Model;
use crate::vqe::RunRecord;
use crate::{Error, Result};

/// Power-law exponents shown in the LRTFIM table.
pub const FIG3_ALPHAS: [f64; 3] = [0.5, 1.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3,
    Fig4,
    SmSpectrum,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::Fig2a,
        Figure::Fig2b,
        Figure::Fig2c,
        Figure::Fig2d,
        Figure::Fig3,
        Figure::Fig4,
        Figure::SmSpectrum,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig2c => "fig2c",
            Figure::Fig2d => "fig2d",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::SmSpectrum => "sm_spectrum",
        }
    }
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOutput {
    pub path: PathBuf,
    pub table: Table,
    pub warnings: Vec<String>,
}

/// All record lines under `dir/records`, in file-name order.
pub fn load_records(dir: &Path) -> Result<Vec<RecordLine>> {
    let rec_dir = dir.join("records");
    let mut files: Vec<PathBuf> = fs::read_dir(&rec_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        out.extend(read_records(&f)?);
    }
    Ok(out)
}

fn is_model(r: &RunRecord, f: impl Fn(&Model) -> bool) -> bool {
    r.model.as_ref().is_some_and(|m| f(&m.model))
}

fn fmt(x: f64) -> String {
    x.to_string()
}

/// Best-of-seeds infidelity and residual energy per `(group, ansatz, n, depth)`.
fn best_by_depth<'a>(
    recs: impl Iterator<Item = (String, &'a RunRecord)>,
) -> BTreeMap<(String, String, usize, usize), (f64, f64, usize)> {
    let mut best: BTreeMap<(String, String, usize, usize), (f64, f64, usize)> = BTreeMap::new();
    for (group, r) in recs {
        let Some(m) = r.metrics.as_ref().filter(|_| r.failed.is_none()) else {
            continue;
        };
        let e = best
            .entry((group, r.ansatz.clone(), r.n_qubits, r.depth))
            .or_insert((f64::INFINITY, f64::INFINITY, 0));
        if m.infidelity < e.0 {
            e.0 = m.infidelity;
            e.1 = m.residual_energy;
        }
        e.2 += 1;
    }
    best
}

/// Build one figure table from a results directory and write it to
/// `dir/tables/<figure>.csv`.
pub fn report(dir: &Path, figure: Figure, threshold: f64) -> Result<ReportOutput> {
    let mut warnings = Vec::new();
    let table = match figure {
        Figure::SmSpectrum => spectrum_table(dir, &mut warnings)?,
        _ => {
            let lines = load_records(dir).unwrap_or_else(|e| {
                warnings.push(format!("no records readable under {}: {e}", dir.display()));
                Vec::new()
            });
            let clean: Vec<&RunRecord> = lines
                .iter()
                .filter(|l| l.noise.is_none())
                .map(|l| &l.record)
                .collect();
            let xxz = |r: &&RunRecord| is_model(r, |m| matches!(m, Model::Xxz { .. }));
            let tfim = |r: &&RunRecord| is_model(r, |m| matches!(m, Model::Tfim { .. }));
            match figure {
                Figure::Fig2a => {
                    depth_table(clean.iter().copied().filter(xxz), "xxz", &mut warnings)
                }
                Figure::Fig2c => {
                    depth_table(clean.iter().copied().filter(tfim), "tfim", &mut warnings)
                }
                Figure::Fig2b => dmin_table(
                    clean.iter().copied().filter(xxz),
                    "xxz",
                    threshold,
                    &mut warnings,
                ),
                Figure::Fig2d => dmin_table(
                    clean.iter().copied().filter(tfim),
                    "tfim",
                    threshold,
                    &mut warnings,
                ),
                Figure::Fig3 => fig3_table(&clean, &mut warnings),
                Figure::Fig4 => fig4_table(&lines, &mut warnings),
                Figure::SmSpectrum => unreachable!(),
            }
        }
    };
    for w in &warnings {
        log::warn!("{}: {w}", figure.id());
    }
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
    wtr.write_record(&table.header).map_err(csv_err)?;
    for r in &table.rows {
        wtr.write_record(r).map_err(csv_err)?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    let path = dir.join("tables").join(format!("{}.csv", figure.id()));
    write_atomic(&path, &bytes)?;
    Ok(ReportOutput {
        path,
        table,
        warnings,
    })
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn depth_table<'a>(
    recs: impl Iterator<Item = &'a RunRecord>,
    model: &str,
    warnings: &mut Vec<String>,
) -> Table {
    let best = best_by_depth(recs.map(|r| (String::new(), r)));
    if best.is_empty() {
        warnings.push(format!("no scored {model} records"));
    }
    Table {
        header: header(&[
            "ansatz",
            "n_qubits",
            "depth",
            "best_infidelity",
            "best_residual_energy",
            "n_seeds",
        ]),
        rows: best
            .into_iter()
            .map(|((_, a, n, d), (inf, res, k))| {
                vec![
                    a,
                    n.to_string(),
                    d.to_string(),
                    fmt(inf),
                    fmt(res),
                    k.to_string(),
                ]
            })
            .collect(),
    }
}

fn dmin_table<'a>(
    recs: impl Iterator<Item = &'a RunRecord>,
    model: &str,
    threshold: f64,
    warnings: &mut Vec<String>,
) -> Table {
    let owned: Vec<RunRecord> = recs.cloned().collect();
    if owned.is_empty() {
        warnings.push(format!("no {model} records"));
    }
    let sweep = min_depth_sweep(&owned, threshold);
    for (a, n, d) in &sweep.gaps {
        warnings.push(format!("{a} n={n}: depth {d} missing"));
    }
    let mut rows = Vec::new();
    for (a, by_n) in sweep.table {
        for (n, d) in by_n {
            rows.push(vec![a.clone(), n.to_string(), d.to_string()]);
        }
    }
    Table {
        header: header(&["ansatz", "n_qubits", "d_min"]),
        rows,
    }
}

fn fig3_table(clean: &[&RunRecord], warnings: &mut Vec<String>) -> Table {
    let mut keep = Vec::new();
    for r in clean {
        let Some(Model::Lrtfim { alpha, .. }) = r.model.as_ref().map(|m| m.model) else {
            continue;
        };
        if FIG3_ALPHAS.iter().any(|&a| (a - alpha).abs() < 1e-12) {
            keep.push((fmt(alpha), *r));
        } else {
            warnings.push(format!("alpha {alpha} outside the figure set, skipped"));
        }
    }
    warnings.dedup();
    if keep.is_empty() {
        warnings.push("no lrtfim records".into());
    }
    let best = best_by_depth(keep.into_iter());
    Table {
        header: header(&[
            "alpha",
            "ansatz",
            "n_qubits",
            "depth",
            "best_infidelity",
            "best_residual_energy",
            "n_seeds",
        ]),
        rows: best
            .into_iter()
            .map(|((al, a, n, d), (inf, res, k))| {
                vec![
                    al,
                    a,
                    n.to_string(),
                    d.to_string(),
                    fmt(inf),
                    fmt(res),
                    k.to_string(),
                ]
            })
            .collect(),
    }
}

fn fig4_table(lines: &[RecordLine], warnings: &mut Vec<String>) -> Table {
    let noisy = best_by_depth(
        lines
            .iter()
            .filter_map(|l| l.noise.as_ref().map(|n| (n.clone(), &l.record))),
    );
    let clean = best_by_depth(
        lines
            .iter()
            .filter(|l| l.noise.is_none())
            .map(|l| (String::new(), &l.record)),
    );
    if noisy.is_empty() {
        warnings.push("no noisy records".into());
    }
    let rows = noisy
        .into_iter()
        .map(|((noise, a, n, d), (inf, res, k))| {
            let c = clean
                .get(&(String::new(), a.clone(), n, d))
                .map(|c| fmt(c.0))
                .unwrap_or_default();
            vec![
                a,
                n.to_string(),
                d.to_string(),
                noise,
                fmt(inf),
                fmt(res),
                c,
                k.to_string(),
            ]
        })
        .collect();
    Table {
        header: header(&[
            "ansatz",
            "n_qubits",
            "depth",
            "noise",
            "best_infidelity",
            "best_residual_energy",
            "noiseless_infidelity",
            "n_seeds",
        ]),
        rows,
    }
}

fn spectrum_table(dir: &Path, warnings: &mut Vec<String>) -> Result<Table> {
    let mut recs: Vec<SpectrumRecord> = Vec::new();
    match fs::read_dir(dir.join("spectra")) {
        Ok(entries) => {
            let mut files: Vec<PathBuf> =
                entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
            files.sort();
            for f in files
                .iter()
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
            {
                recs.push(serde_json::from_str(&fs::read_to_string(f)?)?);
            }
        }
        Err(e) => warnings.push(format!("no spectra directory: {e}")),
    }
    recs.sort_by(|a, b| (&a.ansatz, a.n_qubits, a.depth).cmp(&(&b.ansatz, b.n_qubits, b.depth)));
    Ok(Table {
        header: header(&["ansatz", "n_qubits", "depth", "samples", "ks_distance"]),
        rows: recs
            .into_iter()
            .map(|r| {
                vec![
                    r.ansatz,
                    r.n_qubits.to_string(),
                    r.depth.to_string(),
                    r.samples.to_string(),
                    fmt(r.ks),
                ]
            })
            .collect(),
    })
}
