#ifndef WQED_H
#define WQED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum WqedStatus {
  WQED_STATUS_OK = 0,
  WQED_STATUS_NULL_POINTER = 1,
  WQED_STATUS_INVALID_ARGUMENT = 2,
  WQED_STATUS_DIMENSION_MISMATCH = 3,
  WQED_STATUS_NO_CONVERGENCE = 4,
  WQED_STATUS_NAN_COST = 5,
  WQED_STATUS_CONFIG = 6,
  WQED_STATUS_IO = 7,
  WQED_STATUS_PANIC = 8,
} WqedStatus;

typedef enum WqedInitialState {
  WQED_INITIAL_STATE_ALL_ZERO = 0,
  WQED_INITIAL_STATE_ALL_DOWN = 1,
  WQED_INITIAL_STATE_NEEL = 2,
  WQED_INITIAL_STATE_BELL_PAIRS = 3,
} WqedInitialState;

// Parameterized circuit.
typedef struct WqedCircuit WqedCircuit;

// Hamiltonian as a sum of Pauli strings.
typedef struct WqedOperator WqedOperator;

// Pure state vector.
typedef struct WqedState WqedState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer stays
// valid until the next call into the library from the same thread.
const char *wqed_last_error(void);

// Library version as a static string.
const char *wqed_version(void);

// Build `sum_k coeffs[k] * labels[k]`, each label a string over `IXYZ` with
// qubit 0 first.
//
// # Safety
// `coeffs` and `labels` must each point to `n_terms` readable elements, the
// labels being NUL-terminated strings; `out` must be writable.
enum WqedStatus wqed_operator_from_labels(size_t n_terms,
                                          const double *coeffs,
                                          const char *const *labels,
                                          struct WqedOperator **out_op);

// Build a named model from JSON, e.g.
// `{"model": {"model": "tfim", "g": 1.0}, "n_qubits": 4, "boundary": "open"}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out_op` writable.
enum WqedStatus wqed_operator_model(const char *json, struct WqedOperator **out_op);

// # Safety
// `op` must be a live handle; `out_n` writable.
enum WqedStatus wqed_operator_n_qubits(const struct WqedOperator *op, size_t *out_n);

// Ground energy and ground-manifold dimension.
//
// # Safety
// `op` must be a live handle; the outputs writable (`out_degeneracy` may be NULL).
enum WqedStatus wqed_operator_ground_energy(const struct WqedOperator *op,
                                            double *out_energy,
                                            size_t *out_degeneracy);

// # Safety
// `op` must be NULL or a handle not yet freed.
void wqed_operator_free(struct WqedOperator *op);

// Build an ansatz by kind name (`wqed_i`, `wqed_xx`, `all_to_all_i`,
// `all_to_all_xx`, `powerlaw`, `hea`, `brick_layer`, `hva`). `alpha` is only
// read for `powerlaw`. `hva` prepares its own start state.
//
// # Safety
// `kind` must be a NUL-terminated string and `out_circuit` writable.
enum WqedStatus wqed_circuit_build(const char *kind,
                                   size_t n_qubits,
                                   size_t depth,
                                   enum WqedInitialState initial,
                                   double alpha,
                                   struct WqedCircuit **out_circuit);

// # Safety
// `circuit` must be a live handle; `out_n` writable.
enum WqedStatus wqed_circuit_n_params(const struct WqedCircuit *circuit, size_t *out_n);

// # Safety
// `circuit` must be NULL or a handle not yet freed.
void wqed_circuit_free(struct WqedCircuit *circuit);

// Run the circuit from its initial state.
//
// # Safety
// `params` must hold `n_params` doubles; `circuit` live; `out_state` writable.
enum WqedStatus wqed_state_prepare(const struct WqedCircuit *circuit,
                                   const double *params,
                                   size_t n_params,
                                   struct WqedState **out_state);

// Copy amplitudes as interleaved `(re, im)` pairs; `len` counts doubles and
// must be `2 * 2^n`.
//
// # Safety
// `state` live; `buf` must hold `len` doubles.
enum WqedStatus wqed_state_amplitudes(const struct WqedState *state, double *buf, size_t len);

// `<psi|H|psi>`
//
// # Safety
// Handles live; `out_value` writable.
enum WqedStatus wqed_state_expectation(const struct WqedState *state,
                                       const struct WqedOperator *op,
                                       double *out_value);

// `1 - |P psi|` with `P` the projector on the ground manifold of `op`.
//
// # Safety
// Handles live; `out_value` writable.
enum WqedStatus wqed_state_infidelity(const struct WqedState *state,
                                      const struct WqedOperator *op,
                                      double *out_value);

// # Safety
// `state` must be NULL or a handle not yet freed.
void wqed_state_free(struct WqedState *state);

// Energy of the circuit output.
//
// # Safety
// Handles live; `params` holds `n_params` doubles; `out_value` writable.
enum WqedStatus wqed_cost(const struct WqedCircuit *circuit,
                          const double *params,
                          size_t n_params,
                          const struct WqedOperator *op,
                          double *out_value);

// Central-difference gradient of [`wqed_cost`] into `out_grad` (`n_params` doubles).
//
// # Safety
// Handles live; `params` and `out_grad` hold `n_params` doubles.
enum WqedStatus wqed_gradient(const struct WqedCircuit *circuit,
                              const double *params,
                              size_t n_params,
                              const struct WqedOperator *op,
                              double step,
                              double *out_grad);

// Adiabatically assisted VQE from `h0` to `htarget` with the default
// optimizer and schedule (`max_iters` of 0 keeps the default). Writes the
// final energy and parameters (`n_params` doubles).
//
// # Safety
// Handles live; `out_params` holds `n_params` doubles; `out_energy` writable.
enum WqedStatus wqed_aavqe(const struct WqedOperator *h0,
                           const struct WqedOperator *htarget,
                           const struct WqedCircuit *circuit,
                           uint64_t seed,
                           size_t max_iters,
                           double *out_energy,
                           double *out_params,
                           size_t n_params);

// Run a TOML experiment config. `workers` of 0 uses the default pool size.
// `out_failed` (may be NULL) receives the number of failed runs.
//
// # Safety
// `config_toml` must be a NUL-terminated string.
enum WqedStatus wqed_run_config(const char *config_toml,
                                bool force,
                                size_t workers,
                                size_t *out_failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WQED_H */
