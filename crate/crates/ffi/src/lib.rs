//! C interface to the `wqed` simulator.
//!
//! Every function returns a [`WqedStatus`]; on failure the message is kept per
//! thread and read back with [`wqed_last_error`]. Objects cross the boundary
//! as opaque handles that the caller releases with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wqed::analysis::{infidelity, GroundReference};
use wqed::ansatz::{apply_circuit, Circuit, InitialState};
use wqed::engine::{PauliOperator, StateVector};
use wqed::hamiltonians::{ground_space, ModelSpec};
use wqed::harness::{
    parse_config, run_experiment, AnsatzKind, AnsatzSpec, ModelConfig, ModelKind, RunOptions,
};
use wqed::vqe::{aavqe, cost, gradient, OptimizerConfig, Schedule};
use wqed::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WqedStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NoConvergence = 4,
    NanCost = 5,
    Config = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WqedInitialState {
    AllZero = 0,
    AllDown = 1,
    Neel = 2,
    BellPairs = 3,
}

impl From<WqedInitialState> for InitialState {
    fn from(s: WqedInitialState) -> Self {
        match s {
            WqedInitialState::AllZero => InitialState::AllZero,
            WqedInitialState::AllDown => InitialState::AllDown,
            WqedInitialState::Neel => InitialState::Neel,
            WqedInitialState::BellPairs => InitialState::BellPairs,
        }
    }
}

/// Hamiltonian as a sum of Pauli strings.
pub struct WqedOperator(PauliOperator);

/// Parameterized circuit.
pub struct WqedCircuit(Circuit);

/// Pure state vector.
pub struct WqedState(StateVector);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Null(&'static str),
    Arg(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

type FResult<T> = std::result::Result<T, Fail>;

fn status_of(e: &Error) -> WqedStatus {
    match e {
        Error::DimensionMismatch { .. } => WqedStatus::DimensionMismatch,
        Error::NoConvergence { .. } | Error::GapCriterionNotMet { .. } => WqedStatus::NoConvergence,
        Error::NanCost { .. } => WqedStatus::NanCost,
        Error::Config(_) | Error::Json(_) => WqedStatus::Config,
        Error::Io(_) => WqedStatus::Io,
        _ => WqedStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> FResult<()>) -> WqedStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WqedStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is null"));
            WqedStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            WqedStatus::InvalidArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            WqedStatus::Panic
        }
    }
}

unsafe fn obj<'a, T>(p: *const T, what: &'static str) -> FResult<&'a T> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> FResult<&'a mut T> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> FResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &'static str) -> FResult<&'a mut [T]> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn string<'a>(p: *const c_char, what: &'static str) -> FResult<&'a str> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Arg(format!("{what} is not valid UTF-8")))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn wqed_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn wqed_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build `sum_k coeffs[k] * labels[k]`, each label a string over `IXYZ` with
/// qubit 0 first.
///
/// # Safety
/// `coeffs` and `labels` must each point to `n_terms` readable elements, the
/// labels being NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wqed_operator_from_labels(
    n_terms: usize,
    coeffs: *const c_double,
    labels: *const *const c_char,
    out_op: *mut *mut WqedOperator,
) -> WqedStatus {
    guard(|| {
        let out_op = out(out_op, "out_op")?;
        let coeffs = slice(coeffs, n_terms, "coeffs")?;
        let labels = slice(labels, n_terms, "labels")?;
        if n_terms == 0 {
            return Err(Fail::Arg("operator needs at least one term".into()));
        }
        let mut terms = Vec::with_capacity(n_terms);
        for (&c, &l) in coeffs.iter().zip(labels) {
            terms.push((c, string(l, "label")?));
        }
        *out_op = boxed(WqedOperator(PauliOperator::from_labels(&terms)?));
        Ok(())
    })
}

/// Build a named model from JSON, e.g.
/// `{"model": {"model": "tfim", "g": 1.0}, "n_qubits": 4, "boundary": "open"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_op` writable.
#[no_mangle]
pub unsafe extern "C" fn wqed_operator_model(
    json: *const c_char,
    out_op: *mut *mut WqedOperator,
) -> WqedStatus {
    guard(|| {
        let out_op = out(out_op, "out_op")?;
        let spec: ModelSpec = serde_json::from_str(string(json, "json")?).map_err(Error::from)?;
        *out_op = boxed(WqedOperator(spec.build()?));
        Ok(())
    })
}

/// # Safety
/// `op` must be a live handle; `out_n` writable.
#[no_mangle]
pub unsafe extern "C" fn wqed_operator_n_qubits(
    op: *const WqedOperator,
    out_n: *mut usize,
) -> WqedStatus {
    guard(|| {
        *out(out_n, "out_n")? = obj(op, "op")?.0.n_qubits();
        Ok(())
    })
}

/// Ground energy and ground-manifold dimension.
///
/// # Safety
/// `op` must be a live handle; the outputs writable (`out_degeneracy` may be NULL).
#[no_mangle]
pub unsafe extern "C" fn wqed_operator_ground_energy(
    op: *const WqedOperator,
    out_energy: *mut c_double,
    out_degeneracy: *mut usize,
) -> WqedStatus {
    guard(|| {
        let e = out(out_energy, "out_energy")?;
        let s = ground_space(&obj(op, "op")?.0, 1)?;
        *e = s.ground_energy();
        if let Some(d) = out_degeneracy.as_mut() {
            *d = s.ground_degeneracy;
        }
        Ok(())
    })
}

/// # Safety
/// `op` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wqed_operator_free(op: *mut WqedOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Build an ansatz by kind name (`wqed_i`, `wqed_xx`, `all_to_all_i`,
/// `all_to_all_xx`, `powerlaw`, `hea`, `brick_layer`, `hva`). `alpha` is only
/// read for `powerlaw`. `hva` prepares its own start state.
///
/// # Safety
/// `kind` must be a NUL-terminated string and `out_circuit` writable.
#[no_mangle]
pub unsafe extern "C" fn wqed_circuit_build(
    kind: *const c_char,
    n_qubits: usize,
    depth: usize,
    initial: WqedInitialState,
    alpha: c_double,
    out_circuit: *mut *mut WqedCircuit,
) -> WqedStatus {
    guard(|| {
        let out_circuit = out(out_circuit, "out_circuit")?;
        let name = string(kind, "kind")?;
        let kind: AnsatzKind = serde_json::from_value(serde_json::Value::String(name.into()))
            .map_err(|_| Fail::Arg(format!("unknown ansatz kind {name:?}")))?;
        let spec = AnsatzSpec {
            kind,
            depths: vec![depth, depth],
            global_rotation: None,
            n_exp: None,
            alpha: (kind == AnsatzKind::Powerlaw).then_some(alpha),
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
        *out_circuit = boxed(WqedCircuit(spec.build(
            n_qubits,
            depth,
            &model,
            initial.into(),
        )?));
        Ok(())
    })
}

/// # Safety
/// `circuit` must be a live handle; `out_n` writable.
#[no_mangle]
pub unsafe extern "C" fn wqed_circuit_n_params(
    circuit: *const WqedCircuit,
    out_n: *mut usize,
) -> WqedStatus {
    guard(|| {
        *out(out_n, "out_n")? = obj(circuit, "circuit")?.0.n_params;
        Ok(())
    })
}

/// # Safety
/// `circuit` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wqed_circuit_free(circuit: *mut WqedCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Run the circuit from its initial state.
///
/// # Safety
/// `params` must hold `n_params` doubles; `circuit` live; `out_state` writable.
#[no_mangle]
pub unsafe extern "C" fn wqed_state_prepare(
    circuit: *const WqedCircuit,
    params: *const c_double,
    n_params: usize,
    out_state: *mut *mut WqedState,
) -> WqedStatus {
    guard(|| {
        let out_state = out(out_state, "out_state")?;
        let c = &obj(circuit, "circuit")?.0;
        let p = slice(params, n_params, "params")?;
        *out_state = boxed(WqedState(apply_circuit(c, p, &c.initial()?)?));
        Ok(())
    })
}

/// Copy amplitudes as interleaved `(re, im)` pairs; `len` counts doubles and
/// must be `2 * 2^n`.
///
/// # Safety
/// `state` live; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn wqed_state_amplitudes(
    state: *const WqedState,
    buf: *mut c_double,
    len: usize,
) -> WqedStatus {
    guard(|| {
        let amps = obj(state, "state")?.0.amplitudes();
        if len != 2 * amps.len() {
            return Err(Error::DimensionMismatch {
                expected: 2 * amps.len(),
                got: len,
            }
            .into());
        }
        let buf = slice_mut(buf, len, "buf")?;
        for (pair, a) in buf.chunks_exact_mut(2).zip(amps) {
            pair[0] = a.re;
            pair[1] = a.im;
        }
        Ok(())
    })
}

/// `<psi|H|psi>`
///
/// # Safety
/// Handles live; `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn wqed_state_expectation(
    state: *const WqedState,
    op: *const WqedOperator,
    out_value: *mut c_double,
) -> WqedStatus {
    guard(|| {
        let v = out(out_value, "out_value")?;
        *v = obj(state, "state")?.0.expectation(&obj(op, "op")?.0)?;
        Ok(())
    })
}

/// `1 - |P psi|` with `P` the projector on the ground manifold of `op`.
///
/// # Safety
/// Handles live; `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn wqed_state_infidelity(
    state: *const WqedState,
    op: *const WqedOperator,
    out_value: *mut c_double,
) -> WqedStatus {
    guard(|| {
        let v = out(out_value, "out_value")?;
        let r = GroundReference::new(&obj(op, "op")?.0)?;
        *v = infidelity(&obj(state, "state")?.0, &r.basis)?;
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wqed_state_free(state: *mut WqedState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Energy of the circuit output.
///
/// # Safety
/// Handles live; `params` holds `n_params` doubles; `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn wqed_cost(
    circuit: *const WqedCircuit,
    params: *const c_double,
    n_params: usize,
    op: *const WqedOperator,
    out_value: *mut c_double,
) -> WqedStatus {
    guard(|| {
        let v = out(out_value, "out_value")?;
        *v = cost(
            &obj(circuit, "circuit")?.0,
            slice(params, n_params, "params")?,
            &obj(op, "op")?.0,
        )?;
        Ok(())
    })
}

/// Central-difference gradient of [`wqed_cost`] into `out_grad` (`n_params` doubles).
///
/// # Safety
/// Handles live; `params` and `out_grad` hold `n_params` doubles.
#[no_mangle]
pub unsafe extern "C" fn wqed_gradient(
    circuit: *const WqedCircuit,
    params: *const c_double,
    n_params: usize,
    op: *const WqedOperator,
    step: c_double,
    out_grad: *mut c_double,
) -> WqedStatus {
    guard(|| {
        let c = &obj(circuit, "circuit")?.0;
        let g = gradient(
            c,
            slice(params, n_params, "params")?,
            &obj(op, "op")?.0,
            step,
        )?;
        slice_mut(out_grad, n_params, "out_grad")?.copy_from_slice(&g);
        Ok(())
    })
}

/// Adiabatically assisted VQE from `h0` to `htarget` with the default
/// optimizer and schedule (`max_iters` of 0 keeps the default). Writes the
/// final energy and parameters (`n_params` doubles).
///
/// # Safety
/// Handles live; `out_params` holds `n_params` doubles; `out_energy` writable.
#[no_mangle]
pub unsafe extern "C" fn wqed_aavqe(
    h0: *const WqedOperator,
    htarget: *const WqedOperator,
    circuit: *const WqedCircuit,
    seed: u64,
    max_iters: usize,
    out_energy: *mut c_double,
    out_params: *mut c_double,
    n_params: usize,
) -> WqedStatus {
    guard(|| {
        let e = out(out_energy, "out_energy")?;
        let c = &obj(circuit, "circuit")?.0;
        if n_params != c.n_params {
            return Err(Error::DimensionMismatch {
                expected: c.n_params,
                got: n_params,
            }
            .into());
        }
        let p = slice_mut(out_params, n_params, "out_params")?;
        let mut cfg = OptimizerConfig::default();
        if max_iters > 0 {
            cfg.max_iters = max_iters;
        }
        let rec = aavqe(
            &obj(h0, "h0")?.0,
            &obj(htarget, "htarget")?.0,
            c,
            &Schedule::default(),
            &cfg,
            seed,
        )?;
        if let Some(f) = &rec.failed {
            return Err(Fail::Arg(format!(
                "run failed at s = {}: {}",
                f.s, f.message
            )));
        }
        *e = rec.final_energy().expect("completed run has steps");
        p.copy_from_slice(rec.final_params().expect("completed run has steps"));
        Ok(())
    })
}

/// Run a TOML experiment config. `workers` of 0 uses the default pool size.
/// `out_failed` (may be NULL) receives the number of failed runs.
///
/// # Safety
/// `config_toml` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wqed_run_config(
    config_toml: *const c_char,
    force: bool,
    workers: usize,
    out_failed: *mut usize,
) -> WqedStatus {
    guard(|| {
        let cfg = parse_config(string(config_toml, "config_toml")?)?;
        let m = run_experiment(
            &cfg,
            RunOptions {
                force,
                workers: (workers > 0).then_some(workers),
            },
        )?;
        if let Some(f) = out_failed.as_mut() {
            *f = m.failed;
        }
        Ok(())
    })
}
