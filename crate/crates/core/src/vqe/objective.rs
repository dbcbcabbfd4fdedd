use crate::ansatz::{apply_gates, Backend, Circuit};
use crate::engine::{PauliOperator, StateVector};
use crate::Result;

/// A scalar cost over a flat parameter vector.
pub trait Objective {
    fn n_params(&self) -> usize;

    fn value(&self, params: &[f64]) -> Result<f64>;

    /// Project a single coordinate onto the feasible set.
    fn clamp_coord(&self, _k: usize, v: f64) -> f64 {
        v
    }

    fn clamp(&self, params: &mut [f64]) {
        for (k, p) in params.iter_mut().enumerate() {
            *p = self.clamp_coord(k, *p);
        }
    }

    /// Central differences, taken between the clamped points.
    fn gradient(&self, params: &[f64], step: f64) -> Result<Vec<f64>> {
        let mut g = Vec::with_capacity(params.len());
        let mut p = params.to_vec();
        for k in 0..params.len() {
            let (plus, minus) = (
                self.clamp_coord(k, params[k] + step),
                self.clamp_coord(k, params[k] - step),
            );
            p[k] = plus;
            let cp = self.value(&p)?;
            p[k] = minus;
            let cm = self.value(&p)?;
            p[k] = params[k];
            g.push(if plus == minus {
                0.0
            } else {
                (cp - cm) / (plus - minus)
            });
        }
        Ok(g)
    }
}

/// A state a circuit can act on and whose energy can be read out.
pub trait Evaluable: Backend + Clone {
    fn energy(&self, h: &PauliOperator) -> Result<f64>;
}

impl Evaluable for StateVector {
    fn energy(&self, h: &PauliOperator) -> Result<f64> {
        self.expectation(h)
    }
}

/// `<H>` after running `circuit` on `initial`.
///
/// The gradient reuses the state just before the first gate that reads each
/// parameter, which gives the same numbers as the plain central difference.
pub struct CircuitObjective<'a, S: Evaluable> {
    pub circuit: &'a Circuit,
    pub h: &'a PauliOperator,
    pub initial: S,
}

impl<'a, S: Evaluable> CircuitObjective<'a, S> {
    pub fn new(circuit: &'a Circuit, h: &'a PauliOperator, initial: S) -> Self {
        Self {
            circuit,
            h,
            initial,
        }
    }

    fn finish(&self, prefix: &S, params: &[f64], from: usize) -> Result<f64> {
        let mut s = prefix.clone();
        apply_gates(self.circuit, params, &mut s, from..self.circuit.gates.len())?;
        s.energy(self.h)
    }
}

impl<S: Evaluable> Objective for CircuitObjective<'_, S> {
    fn n_params(&self) -> usize {
        self.circuit.n_params
    }

    fn value(&self, params: &[f64]) -> Result<f64> {
        self.finish(&self.initial, params, 0)
    }

    fn clamp_coord(&self, k: usize, v: f64) -> f64 {
        self.circuit.clamp_slot(k, v)
    }

    fn gradient(&self, params: &[f64], step: f64) -> Result<Vec<f64>> {
        self.circuit.check_params(params)?;
        let first = self.circuit.first_gate_of_slot();
        let mut order: Vec<usize> = (0..params.len()).collect();
        order.sort_by_key(|&k| first[k]);
        let mut g = vec![0.0; params.len()];
        let mut prefix = self.initial.clone();
        let mut at = 0;
        let mut p = params.to_vec();
        for k in order {
            let gk = first[k];
            apply_gates(self.circuit, params, &mut prefix, at..gk)?;
            at = gk;
            let (plus, minus) = (
                self.clamp_coord(k, params[k] + step),
                self.clamp_coord(k, params[k] - step),
            );
            p[k] = plus;
            let cp = self.finish(&prefix, &p, gk)?;
            p[k] = minus;
            let cm = self.finish(&prefix, &p, gk)?;
            p[k] = params[k];
            g[k] = if plus == minus {
                0.0
            } else {
                (cp - cm) / (plus - minus)
            };
        }
        Ok(g)
    }
}

/// Energy of the circuit output from the circuit's own initial state.
pub fn cost(circuit: &Circuit, params: &[f64], h: &PauliOperator) -> Result<f64> {
    cost_from(circuit, params, h, &circuit.initial()?)
}

pub fn cost_from(
    circuit: &Circuit,
    params: &[f64],
    h: &PauliOperator,
    initial: &StateVector,
) -> Result<f64> {
    CircuitObjective::new(circuit, h, initial.clone()).value(params)
}

/// Central-difference gradient from the circuit's initial state.
pub fn gradient(
    circuit: &Circuit,
    params: &[f64],
    h: &PauliOperator,
    step: f64,
) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(crate::Error::invalid(
            "step",
            format!("{step} must be positive"),
        ));
    }
    CircuitObjective::new(circuit, h, circuit.initial()?).gradient(params, step)
}
