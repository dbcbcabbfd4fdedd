use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ansatz::{
    build_all_to_all, build_brick_layer, build_hea, build_hva, build_powerlaw_wqed,
    build_powerlaw_wqed_frozen, build_wqed_ansatz, Circuit, HvaModel, InitialState, WqedVariant,
};
use crate::engine::PauliOperator;
use crate::hamiltonians::{
    build_cost, build_lrtfim, build_tfim, build_xxz, critical_theta, total_z, zz_bonds, Boundary,
    Model, ModelSpec,
};
use crate::noise::{NoiseModel, MAX_NOISY_QUBITS};
use crate::vqe::{OptimizerConfig, Schedule};
use crate::{Error, Result};

/// Version of the config grammar and of the record/summary schemas.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModelKind {
    Tfim,
    Xxz,
    Lrtfim,
}

/// `theta = 0.7` or `theta = "critical"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSetting {
    Value(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaSetting>,
    /// Scan step for the critical point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum AnsatzKind {
    WqedXx,
    WqedI,
    AllToAllI,
    AllToAllXx,
    Powerlaw,
    Hea,
    BrickLayer,
    Hva,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    /// Inclusive `[min, max]`.
    pub depths: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global_rotation: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_exp: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub freeze: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSetting {
    Preset(String),
    Probabilities(NoiseModel),
}

impl NoiseSetting {
    pub fn resolve(&self) -> Result<(String, NoiseModel)> {
        match self {
            NoiseSetting::Preset(name) => Ok((name.clone(), NoiseModel::preset(name)?)),
            NoiseSetting::Probabilities(m) => {
                m.validate()?;
                Ok((format!("p1={}_p2={}", m.p1, m.p2), *m))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}

fn default_true() -> bool {
    true
}

fn default_noisy_limit() -> usize {
    MAX_NOISY_QUBITS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    pub model: ModelConfig,
    pub qubits: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub ansatz: Vec<AnsatzSpec>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSetting>,
    /// Run the optimizations; turn off for spectrum-only configs.
    #[serde(default = "default_true")]
    pub vqe: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default = "default_noisy_limit")]
    pub max_noisy_qubits: usize,
    /// Worker threads are reduced so the estimated footprint stays under this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_budget_mb: Option<u64>,
}

fn cfg_err(field: impl AsRef<str>, msg: impl AsRef<str>) -> Error {
    Error::Config(format!("{}: {}", field.as_ref(), msg.as_ref()))
}

/// Parse and validate a TOML config; syntax errors carry line and column.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(cfg_err(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        self.model.validate()?;
        if self.qubits.is_empty() {
            return Err(cfg_err("qubits", "empty"));
        }
        for &n in &self.qubits {
            if n < 2 {
                return Err(cfg_err("qubits", format!("{n} is below 2")));
            }
            if self.model.kind == ModelKind::Xxz && n % 2 != 0 {
                log::info!("xxz with odd n = {n}: Neel start state is not balanced");
            }
        }
        if self.seeds.is_empty() {
            return Err(cfg_err("seeds", "empty"));
        }
        if self.ansatz.is_empty() {
            return Err(cfg_err("ansatz", "no ansatz listed"));
        }
        for (i, a) in self.ansatz.iter().enumerate() {
            a.validate(i, &self.model)?;
        }
        let mut ids: Vec<String> = self.ansatz.iter().map(|a| a.id()).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(cfg_err(
                "ansatz",
                format!("duplicate id {:?}; set distinct labels", w[0]),
            ));
        }
        self.optimizer
            .validate()
            .map_err(|e| cfg_err("optimizer", e.to_string()))?;
        self.schedule
            .validate()
            .map_err(|e| cfg_err("schedule", e.to_string()))?;
        if let Some(noise) = &self.noise {
            noise
                .resolve()
                .map_err(|e| cfg_err("noise", e.to_string()))?;
            let limit = self
                .max_noisy_qubits
                .min(crate::engine::density::MAX_DENSITY_QUBITS);
            if let Some(&n) = self.qubits.iter().find(|&&n| n > limit) {
                return Err(cfg_err(
                    "qubits",
                    format!("{n} exceeds the noisy limit {limit}"),
                ));
            }
        }
        if let Some(s) = &self.spectrum {
            if s.samples == 0 {
                return Err(cfg_err("spectrum.samples", "must be at least 1"));
            }
            if let Some(&n) = self.qubits.iter().find(|&&n| n % 2 != 0) {
                return Err(cfg_err("qubits", format!("spectrum needs even n, got {n}")));
            }
        }
        if !self.vqe && self.spectrum.is_none() {
            return Err(cfg_err(
                "vqe",
                "nothing to do: vqe is off and no [spectrum] section",
            ));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form, ignoring `output_dir`.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("output_dir");
        }
        let text = serde_json::to_string(&v).expect("value serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn noise(&self) -> Result<Option<(String, NoiseModel)>> {
        self.noise.as_ref().map(|n| n.resolve()).transpose()
    }
}

impl ModelConfig {
    fn validate(&self) -> Result<()> {
        let allowed: &[&str] = match self.kind {
            ModelKind::Tfim => &["g", "boundary"],
            ModelKind::Xxz => &["delta", "boundary"],
            ModelKind::Lrtfim => &["alpha", "theta", "grid"],
        };
        let present = [
            ("g", self.g.is_some()),
            ("delta", self.delta.is_some()),
            ("alpha", self.alpha.is_some()),
            ("theta", self.theta.is_some()),
            ("grid", self.grid.is_some()),
            ("boundary", self.boundary.is_some()),
        ];
        for (name, is_set) in present {
            if is_set && !allowed.contains(&name) {
                return Err(cfg_err(
                    format!("model.{name}"),
                    format!("not a parameter of {:?}", self.kind),
                ));
            }
        }
        if self.kind == ModelKind::Lrtfim {
            let a = self
                .alpha
                .ok_or_else(|| cfg_err("model.alpha", "required for lrtfim"))?;
            if !(a > 0.0) {
                return Err(cfg_err("model.alpha", format!("{a} must be positive")));
            }
            match &self.theta {
                Some(ThetaSetting::Named(s)) if s != "critical" => {
                    return Err(cfg_err(
                        "model.theta",
                        format!("expected a number or \"critical\", got {s:?}"),
                    ));
                }
                Some(ThetaSetting::Value(t))
                    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(t) =>
                {
                    return Err(cfg_err("model.theta", format!("{t} outside [0, pi/2]")));
                }
                _ => {}
            }
            if let Some(g) = self.grid {
                if !(g > 0.0) {
                    return Err(cfg_err("model.grid", format!("{g} must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary.unwrap_or_default()
    }

    /// Target, interpolation start and schedule end for `n` qubits.
    pub fn problem(&self, n: usize, schedule: &Schedule) -> Result<Problem> {
        let bc = self.boundary();
        match self.kind {
            ModelKind::Tfim => {
                let g = self.g.unwrap_or(1.0);
                let target = build_tfim(n, g, bc)?;
                Ok(Problem {
                    spec: ModelSpec {
                        model: Model::Tfim { g },
                        n_qubits: n,
                        boundary: bc,
                    },
                    h0: total_z(n)?,
                    htarget: target.clone(),
                    scored: target,
                    initial_state: InitialState::AllDown,
                    schedule: *schedule,
                })
            }
            ModelKind::Xxz => {
                let delta = self.delta.unwrap_or(1.0);
                let target = build_xxz(n, delta, bc)?;
                Ok(Problem {
                    spec: ModelSpec {
                        model: Model::Xxz { delta },
                        n_qubits: n,
                        boundary: bc,
                    },
                    h0: zz_bonds(n, bc)?,
                    htarget: target.clone(),
                    scored: target,
                    initial_state: InitialState::Neel,
                    schedule: *schedule,
                })
            }
            ModelKind::Lrtfim => {
                let alpha = self.alpha.expect("validated");
                let theta = match &self.theta {
                    Some(ThetaSetting::Value(t)) => *t,
                    _ => critical_theta(n, alpha, self.grid.unwrap_or(0.01))?,
                };
                // (1-s) sum Z + s H(pi/2) is proportional to H(theta) at this s.
                let s_end = theta.sin() / (theta.sin() + theta.cos());
                let h0 = total_z(n)?;
                let htarget = build_lrtfim(n, alpha, std::f64::consts::FRAC_PI_2, Boundary::Open)?;
                let scored = build_cost(s_end, &h0, &htarget)?;
                let mut schedule = *schedule;
                schedule.s_end = s_end;
                schedule.s_start = schedule.s_start.min(s_end);
                Ok(Problem {
                    spec: ModelSpec {
                        model: Model::Lrtfim { alpha, theta },
                        n_qubits: n,
                        boundary: Boundary::Open,
                    },
                    h0,
                    htarget,
                    scored,
                    initial_state: InitialState::AllDown,
                    schedule,
                })
            }
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }
}

/// Everything a run needs about the physics for one system size.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: ModelSpec,
    pub h0: PauliOperator,
    pub htarget: PauliOperator,
    /// Hamiltonian whose ground space scores the final state.
    pub scored: PauliOperator,
    pub initial_state: InitialState,
    pub schedule: Schedule,
}

impl AnsatzSpec {
    pub fn validate(&self, i: usize, model: &ModelConfig) -> Result<()> {
        let field = |f: &str| format!("ansatz[{i}].{f}");
        match self.depths.as_slice() {
            [lo, hi] if *lo >= 1 && lo <= hi => {}
            [lo, hi] => {
                return Err(cfg_err(
                    field("depths"),
                    format!("empty range [{lo}, {hi}]"),
                ))
            }
            _ => return Err(cfg_err(field("depths"), "expected [min, max]")),
        }
        let is_powerlaw = self.kind == AnsatzKind::Powerlaw;
        if !is_powerlaw && (self.n_exp.is_some() || self.alpha.is_some() || self.freeze) {
            return Err(cfg_err(
                field("kind"),
                "n_exp, alpha and freeze only apply to powerlaw",
            ));
        }
        if is_powerlaw {
            if self.alpha.or(model.alpha).is_none() {
                return Err(cfg_err(
                    field("alpha"),
                    "required unless the model is lrtfim",
                ));
            }
            if self.n_exp == Some(0) {
                return Err(cfg_err(field("n_exp"), "must be at least 1"));
            }
        }
        let has_rotation_choice = matches!(
            self.kind,
            AnsatzKind::WqedXx | AnsatzKind::WqedI | AnsatzKind::AllToAllI | AnsatzKind::AllToAllXx
        );
        if self.global_rotation.is_some() && !has_rotation_choice {
            return Err(cfg_err(
                field("global_rotation"),
                "only applies to wqed and all_to_all kinds",
            ));
        }
        if self.kind == AnsatzKind::Hva && model.kind == ModelKind::Lrtfim {
            return Err(cfg_err(
                field("kind"),
                "hva is defined for tfim and xxz only",
            ));
        }
        Ok(())
    }

    pub fn depth_range(&self) -> std::ops::RangeInclusive<usize> {
        self.depths[0]..=self.depths[1]
    }

    /// Name used in records and tables.
    pub fn id(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match self.kind {
            AnsatzKind::WqedXx => "wqed_xx",
            AnsatzKind::WqedI => "wqed_i",
            AnsatzKind::AllToAllI => "all_to_all_i",
            AnsatzKind::AllToAllXx => "all_to_all_xx",
            AnsatzKind::Powerlaw if self.freeze => "powerlaw_wqed_frozen",
            AnsatzKind::Powerlaw => "powerlaw_wqed",
            AnsatzKind::Hea => "hea",
            AnsatzKind::BrickLayer => "brick_layer",
            AnsatzKind::Hva => "hva",
        }
        .to_string()
    }

    /// Circuit for `n` qubits at `depth`, starting from the model's reference
    /// state (HVA keeps its own).
    pub fn build(
        &self,
        n: usize,
        depth: usize,
        model: &ModelConfig,
        start: InitialState,
    ) -> Result<Circuit> {
        let c = match self.kind {
            AnsatzKind::WqedXx => build_wqed_ansatz(
                WqedVariant::Xx,
                n,
                depth,
                self.global_rotation.unwrap_or(false),
            )?,
            AnsatzKind::WqedI => build_wqed_ansatz(
                WqedVariant::I,
                n,
                depth,
                self.global_rotation.unwrap_or(true),
            )?,
            AnsatzKind::AllToAllI => build_all_to_all(
                WqedVariant::I,
                n,
                depth,
                self.global_rotation.unwrap_or(true),
            )?,
            AnsatzKind::AllToAllXx => build_all_to_all(
                WqedVariant::Xx,
                n,
                depth,
                self.global_rotation.unwrap_or(false),
            )?,
            AnsatzKind::Powerlaw => {
                let alpha = self.alpha.or(model.alpha).expect("validated");
                let k = self.n_exp.unwrap_or(2);
                if self.freeze {
                    build_powerlaw_wqed_frozen(n, depth, alpha, k)?
                } else {
                    build_powerlaw_wqed(n, depth, alpha, k)?
                }
            }
            AnsatzKind::Hea => build_hea(n, depth)?,
            AnsatzKind::BrickLayer => build_brick_layer(n, depth)?,
            AnsatzKind::Hva => {
                let m = match model.kind {
                    ModelKind::Xxz => HvaModel::Xxz,
                    _ => HvaModel::Tfim,
                };
                return Ok(rename(build_hva(m, n, depth)?, self.id()));
            }
        };
        Ok(rename(c.with_initial_state(start), self.id()))
    }
}

fn rename(mut c: Circuit, id: String) -> Circuit {
    c.name = id;
    c
}
