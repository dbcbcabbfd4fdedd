use std::fs;
use std::process::Command;

fn wqed() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wqed"));
    c.env("RUST_LOG", "warn");
    c
}

#[test]
fn ed_prints_ground_energy() {
    let out = wqed()
        .args(["ed", "--model", "tfim", "-n", "2", "--g", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let e = v["ground_energy"].as_f64().unwrap();
    assert!((e + 5f64.sqrt()).abs() < 1e-10, "{e}");
    assert!((v["e_max"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-10);
}

#[test]
fn fit_powerlaw_prints_terms() {
    let out = wqed()
        .args(["fit-powerlaw", "--alpha", "1", "--rmax", "6", "--nexp", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);
}

#[test]
fn spectrum_prints_ks() {
    let out = wqed()
        .args([
            "spectrum",
            "--ansatz",
            "hea",
            "-n",
            "4",
            "--depth",
            "1",
            "--samples",
            "10",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ks = v["ks"].as_f64().unwrap();
    assert!(ks > 0.0 && ks <= 1.0);
}

#[test]
fn run_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(
        &cfg,
        r#"
schema_version = 1
qubits = [3]
seeds = [0]

[model]
kind = "tfim"

[optimizer]
max_iters = 10

[[ansatz]]
kind = "hea"
depths = [1, 2]
"#,
    )
    .unwrap();
    let dir = tmp.path().join("out");
    let st = wqed()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--output",
            dir.to_str().unwrap(),
        ])
        .env("WQED_WORKERS", "1")
        .status()
        .unwrap();
    assert!(st.success());
    assert!(dir.join("records/hea_n3_d2_s0.jsonl").exists());
    let st = wqed()
        .args(["report", dir.to_str().unwrap(), "--figure", "fig2c"])
        .status()
        .unwrap();
    assert!(st.success());
    let table = fs::read_to_string(dir.join("tables/fig2c.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn bad_input_exits_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "schema_version = 1\nqubits = [4]\nbogus = 1\n").unwrap();
    let out = wqed()
        .args(["run", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    let out = wqed()
        .args(["report", ".", "--figure", "fig9"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
