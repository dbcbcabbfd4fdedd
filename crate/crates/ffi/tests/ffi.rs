use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use wqed_ffi::*;

fn last_error() -> String {
    let p = wqed_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn operator(terms: &[(f64, &str)]) -> *mut WqedOperator {
    let coeffs: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let labels: Vec<CString> = terms.iter().map(|t| CString::new(t.1).unwrap()).collect();
    let ptrs: Vec<*const i8> = labels.iter().map(|l| l.as_ptr()).collect();
    let mut op = ptr::null_mut();
    let st = unsafe {
        wqed_operator_from_labels(terms.len(), coeffs.as_ptr(), ptrs.as_ptr().cast(), &mut op)
    };
    assert_eq!(st, WqedStatus::Ok);
    op
}

fn circuit(kind: &str, n: usize, depth: usize, init: WqedInitialState) -> *mut WqedCircuit {
    let k = CString::new(kind).unwrap();
    let mut c = ptr::null_mut();
    let st = unsafe { wqed_circuit_build(k.as_ptr(), n, depth, init, 0.0, &mut c) };
    assert_eq!(st, WqedStatus::Ok, "{}", last_error());
    c
}

#[test]
fn ground_energy_of_two_qubit_tfim() {
    let h = operator(&[(-1.0, "XX"), (1.0, "ZI"), (1.0, "IZ")]);
    let (mut e, mut d, mut n) = (0.0, 0, 0);
    unsafe {
        assert_eq!(
            wqed_operator_ground_energy(h, &mut e, &mut d),
            WqedStatus::Ok
        );
        assert_eq!(wqed_operator_n_qubits(h, &mut n), WqedStatus::Ok);
        wqed_operator_free(h);
    }
    assert!((e + 5f64.sqrt()).abs() < 1e-10);
    assert_eq!(d, 1);
    assert_eq!(n, 2);
    assert!(wqed_last_error().is_null());
}

#[test]
fn model_from_json_matches_labels() {
    let json = CString::new(r#"{"model": {"model": "tfim", "g": 1.0}, "n_qubits": 2}"#).unwrap();
    let mut h = ptr::null_mut();
    let mut e = 0.0;
    unsafe {
        assert_eq!(wqed_operator_model(json.as_ptr(), &mut h), WqedStatus::Ok);
        wqed_operator_ground_energy(h, &mut e, ptr::null_mut());
        wqed_operator_free(h);
    }
    assert!((e + 5f64.sqrt()).abs() < 1e-10);

    let bad = CString::new(r#"{"model": {"model": "tfim"}, "n_qubits": 2}"#).unwrap();
    let st = unsafe { wqed_operator_model(bad.as_ptr(), &mut h) };
    assert_eq!(st, WqedStatus::Config);
    assert!(last_error().contains('g'));
}

#[test]
fn state_amplitudes_and_expectation() {
    let c = circuit("hea", 2, 1, WqedInitialState::AllZero);
    let mut np = 0;
    unsafe { wqed_circuit_n_params(c, &mut np) };
    let params = vec![0.0; np];
    let mut s = ptr::null_mut();
    let h = operator(&[(1.0, "ZI"), (0.5, "IZ")]);
    let mut buf = [0.0; 8];
    let mut e = 0.0;
    let mut inf = 0.0;
    let mut cst = 0.0;
    unsafe {
        assert_eq!(
            wqed_state_prepare(c, params.as_ptr(), np, &mut s),
            WqedStatus::Ok
        );
        assert_eq!(
            wqed_state_amplitudes(s, buf.as_mut_ptr(), 8),
            WqedStatus::Ok
        );
        assert_eq!(wqed_state_expectation(s, h, &mut e), WqedStatus::Ok);
        assert_eq!(wqed_state_infidelity(s, h, &mut inf), WqedStatus::Ok);
        assert_eq!(
            wqed_cost(c, params.as_ptr(), np, h, &mut cst),
            WqedStatus::Ok
        );
        assert_eq!(
            wqed_state_amplitudes(s, buf.as_mut_ptr(), 6),
            WqedStatus::DimensionMismatch
        );
        wqed_state_free(s);
        wqed_operator_free(h);
        wqed_circuit_free(c);
    }
    let p0 = buf[0] * buf[0] + buf[1] * buf[1];
    assert!((p0 - 1.0).abs() < 1e-12, "{buf:?}");
    assert!((e - 1.5).abs() < 1e-12);
    assert!((cst - e).abs() < 1e-12);
    // |00> has the highest energy of this operator; the ground state is |11>
    assert!((inf - 1.0).abs() < 1e-12);
}

#[test]
fn gradient_and_aavqe() {
    let h0 = operator(&[(1.0, "ZII"), (1.0, "IZI"), (1.0, "IIZ")]);
    let ht = operator(&[
        (-1.0, "XXI"),
        (-1.0, "IXX"),
        (1.0, "ZII"),
        (1.0, "IZI"),
        (1.0, "IIZ"),
    ]);
    let c = circuit("wqed_i", 3, 2, WqedInitialState::AllDown);
    let mut np = 0;
    unsafe { wqed_circuit_n_params(c, &mut np) };
    let mut params = vec![0.0; np];
    let mut e = 0.0;
    let mut e_gs = 0.0;
    let mut grad = vec![0.0; np];
    unsafe {
        assert_eq!(
            wqed_aavqe(h0, ht, c, 1, 200, &mut e, params.as_mut_ptr(), np),
            WqedStatus::Ok
        );
        wqed_operator_ground_energy(ht, &mut e_gs, ptr::null_mut());
        assert_eq!(
            wqed_gradient(c, params.as_ptr(), np, ht, 1e-5, grad.as_mut_ptr()),
            WqedStatus::Ok
        );
        assert_eq!(
            wqed_gradient(c, params.as_ptr(), np, ht, 0.0, grad.as_mut_ptr()),
            WqedStatus::InvalidArgument
        );
        assert_eq!(
            wqed_aavqe(h0, ht, c, 1, 5, &mut e, params.as_mut_ptr(), np + 1),
            WqedStatus::DimensionMismatch
        );
        wqed_operator_free(h0);
        wqed_operator_free(ht);
        wqed_circuit_free(c);
    }
    assert!(e >= e_gs - 1e-9);
    assert!(e - e_gs < 0.1, "{e} vs {e_gs}");
    assert!(params.iter().any(|&p| p != 0.0));
}

#[test]
fn errors_are_reported() {
    let mut op = ptr::null_mut();
    let label = CString::new("XQ").unwrap();
    let coeffs = [1.0];
    let labels = [label.as_ptr()];
    unsafe {
        assert_eq!(
            wqed_operator_from_labels(1, coeffs.as_ptr(), labels.as_ptr(), ptr::null_mut()),
            WqedStatus::NullPointer
        );
        assert!(last_error().contains("out_op"));
        assert_eq!(
            wqed_operator_from_labels(1, ptr::null(), labels.as_ptr(), &mut op),
            WqedStatus::NullPointer
        );
        assert_eq!(
            wqed_operator_from_labels(1, coeffs.as_ptr(), labels.as_ptr(), &mut op),
            WqedStatus::InvalidArgument
        );
        assert!(op.is_null());
        let mut n = 0;
        assert_eq!(
            wqed_operator_n_qubits(ptr::null(), &mut n),
            WqedStatus::NullPointer
        );
        let kind = CString::new("ladder").unwrap();
        let mut c = ptr::null_mut();
        let st = wqed_circuit_build(kind.as_ptr(), 4, 1, WqedInitialState::AllZero, 0.0, &mut c);
        assert_eq!(st, WqedStatus::InvalidArgument);
        assert!(last_error().contains("ladder"));
        let kind = CString::new("powerlaw").unwrap();
        let st = wqed_circuit_build(kind.as_ptr(), 4, 1, WqedInitialState::AllZero, -1.0, &mut c);
        assert_ne!(st, WqedStatus::Ok);
        wqed_operator_free(ptr::null_mut());
        wqed_circuit_free(ptr::null_mut());
        wqed_state_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(wqed_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn errors_are_per_thread() {
    let mut n = 0;
    unsafe { wqed_operator_n_qubits(ptr::null(), &mut n) };
    assert!(!wqed_last_error().is_null());
    std::thread::spawn(|| assert!(wqed_last_error().is_null()))
        .join()
        .unwrap();
}

#[test]
fn run_config_writes_records() {
    let tmp = tempfile::tempdir().unwrap();
    let toml = format!(
        "schema_version = 1\noutput_dir = \"{}\"\nqubits = [2]\nseeds = [0]\n[model]\nkind = \"tfim\"\n[optimizer]\nmax_iters = 5\n[[ansatz]]\nkind = \"hea\"\ndepths = [1, 2]\n",
        tmp.path().display()
    );
    let text = CString::new(toml).unwrap();
    let mut failed = 99;
    let st = unsafe { wqed_run_config(text.as_ptr(), false, 1, &mut failed) };
    assert_eq!(st, WqedStatus::Ok, "{}", last_error());
    assert_eq!(failed, 0);
    assert!(tmp.path().join("records/hea_n2_d2_s0.jsonl").exists());
    let bad = CString::new("schema_version = 1\nwhat = 2\n").unwrap();
    assert_eq!(
        unsafe { wqed_run_config(bad.as_ptr(), false, 1, ptr::null_mut()) },
        WqedStatus::Config
    );
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/wqed.h")).unwrap();
    for f in [
        "wqed_last_error",
        "wqed_operator_from_labels",
        "wqed_circuit_build",
        "wqed_aavqe",
        "wqed_run_config",
    ] {
        assert!(header.contains(f), "{f} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/c/smoke.c"))
        .output()
    else {
        eprintln!("no C compiler; header only checked textually");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
