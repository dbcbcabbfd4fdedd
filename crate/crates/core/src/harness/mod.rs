//! Config-driven experiment runner: TOML configs, parallel runs with
//! JSON-lines records, a summary CSV, a manifest and figure tables.

mod config;
mod io;
mod report;
mod run;

pub use config::{
    parse_config, AnsatzKind, AnsatzSpec, ExperimentConfig, ModelConfig, ModelKind, NoiseSetting,
    Problem, SpectrumConfig, ThetaSetting, SCHEMA_VERSION,
};
pub use io::{read_records, write_atomic};
pub use report::{load_records, report, Figure, ReportOutput, Table, FIG3_ALPHAS};
pub use run::{
    run_experiment, worker_count, write_summary, Manifest, ManifestEntry, RecordLine, RunKey,
    RunOptions, RunStatus, SpectrumRecord, SUMMARY_HEADER, WORKERS_ENV,
};
