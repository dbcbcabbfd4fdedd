use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use wqed::analysis::entanglement_spectrum;
use wqed::ansatz::fit_powerlaw;
use wqed::hamiltonians::{
    critical_theta, ground_space_with, max_eigenvalue, Boundary, Method, Model, ModelSpec,
};
use wqed::harness::{
    parse_config, report, run_experiment, AnsatzKind, AnsatzSpec, Figure, ModelConfig, ModelKind,
    RunOptions, WORKERS_ENV,
};
use wqed::vqe::Schedule;
use wqed::{Error, Result};

#[derive(Parser)]
#[command(name = "wqed", version, about = "Waveguide-QED ansatz VQE simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every (ansatz, n, depth, seed) of a TOML config.
    Run {
        config: PathBuf,
        /// Recompute records that are already complete.
        #[arg(long)]
        force: bool,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
        /// Override the config's output_dir.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a figure table from a results directory.
    Report {
        dir: PathBuf,
        /// fig2a, fig2b, fig2c, fig2d, fig3, fig4, sm_spectrum or all.
        #[arg(long)]
        figure: String,
        /// Fidelity threshold for the minimum-depth tables.
        #[arg(long, default_value_t = 0.99)]
        threshold: f64,
    },
    /// Exact diagonalization of a model.
    Ed {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short, long)]
        n: usize,
        /// Number of lowest levels.
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, value_parser = ["auto", "dense", "lanczos"], default_value = "auto")]
        method: String,
    },
    /// Fit a sum of exponentials to 1/r^alpha on r = 1..rmax.
    FitPowerlaw {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        rmax: usize,
        #[arg(long)]
        nexp: usize,
    },
    /// Entanglement spectrum of random-parameter circuits against Marchenko-Pastur.
    Spectrum {
        #[arg(long, value_enum)]
        ansatz: AnsatzKind,
        #[arg(short, long)]
        n: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Power-law exponent for the powerlaw ansatz.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n_exp: Option<usize>,
        /// Print the pooled eigenvalues too.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "tfim")]
    model: ModelKind,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// A number in [0, pi/2] or "critical".
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    periodic: bool,
}

impl ModelArgs {
    fn spec(&self, n: usize) -> Result<ModelSpec> {
        let boundary = if self.periodic {
            Boundary::Periodic
        } else {
            Boundary::Open
        };
        let model = match self.model {
            ModelKind::Tfim => Model::Tfim {
                g: self.g.unwrap_or(1.0),
            },
            ModelKind::Xxz => Model::Xxz {
                delta: self.delta.unwrap_or(1.0),
            },
            ModelKind::Lrtfim => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::Config("--alpha is required for lrtfim".into()))?;
                let theta = match self.theta.as_deref() {
                    None | Some("critical") => critical_theta(n, alpha, 0.01)?,
                    Some(t) => t.parse().map_err(|_| {
                        Error::Config(format!("--theta: {t:?} is not a number or \"critical\""))
                    })?,
                };
                Model::Lrtfim { alpha, theta }
            }
        };
        Ok(ModelSpec {
            model,
            n_qubits: n,
            boundary,
        })
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Run {
            config,
            force,
            workers,
            output,
        } => {
            let mut cfg = parse_config(&std::fs::read_to_string(&config)?)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            if let Some(o) = output {
                cfg.output_dir = o;
            }
            let m = run_experiment(&cfg, RunOptions { force, workers })?;
            println!(
                "{}: computed {}, skipped {}, failed {}",
                cfg.output_dir.display(),
                m.computed,
                m.skipped,
                m.failed
            );
            Ok(m.failed == 0)
        }
        Cmd::Report {
            dir,
            figure,
            threshold,
        } => {
            let figs = if figure == "all" {
                Figure::ALL.to_vec()
            } else {
                vec![figure.parse()?]
            };
            for f in figs {
                let out = report(&dir, f, threshold)?;
                println!("{} ({} rows)", out.path.display(), out.table.rows.len());
            }
            Ok(true)
        }
        Cmd::Ed {
            model,
            n,
            levels,
            method,
        } => {
            let spec = model.spec(n)?;
            let h = spec.build()?;
            let method = match method.as_str() {
                "dense" => Method::Dense,
                "lanczos" => Method::Lanczos,
                _ => Method::Auto,
            };
            let s = ground_space_with(&h, levels.max(1), method)?;
            let out = json!({
                "spec": spec,
                "eigenvalues": s.eigenvalues,
                "ground_energy": s.ground_energy(),
                "ground_degeneracy": s.ground_degeneracy,
                "gap": s.gap(),
                "e_max": max_eigenvalue(&h)?,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Cmd::FitPowerlaw { alpha, rmax, nexp } => {
            let fit = fit_powerlaw(alpha, rmax, nexp)?;
            let terms: Vec<_> = fit
                .terms
                .iter()
                .map(|&(j, l)| json!({ "j": j, "l": l }))
                .collect();
            let out = json!({
                "alpha": alpha,
                "rmax": rmax,
                "terms": terms,
                "max_rel_residual": fit.max_rel_residual,
                "sum_sq": fit.sum_sq,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Cmd::Spectrum {
            ansatz,
            n,
            depth,
            samples,
            seed,
            alpha,
            n_exp,
            full,
        } => {
            let spec = AnsatzSpec {
                kind: ansatz,
                depths: vec![depth, depth],
                global_rotation: None,
                n_exp,
                alpha,
                freeze: false,
                label: None,
            };
            let model = ModelConfig {
                kind: ModelKind::Tfim,
                g: None,
                delta: None,
                alpha: None,
                theta: None,
                grid: None,
                boundary: None,
            };
            spec.validate(0, &model)?;
            let start = model.problem(n, &Schedule::default())?.initial_state;
            let circ = spec.build(n, depth, &model, start)?;
            let es = entanglement_spectrum(&circ, samples, seed)?;
            let mut out = json!({
                "ansatz": spec.id(),
                "n_qubits": n,
                "depth": depth,
                "samples": samples,
                "seed": seed,
                "ks": es.ks,
            });
            if full {
                out["eigenvalues"] = json!(es.samples);
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
