//! Parameterized circuits: wQED (exponential, power-law, all-to-all), HEA,
//! brick-layer and HVA, plus the exponential-sum fit of power laws.

mod apply;
mod builders;
mod fit;

pub use apply::{apply_circuit, apply_gates, gate_generator, Axis, Backend, CIRCUIT_EXPM_TOL};
pub use builders::{
    build_all_to_all, build_brick_layer, build_hea, build_hva, build_powerlaw_wqed,
    build_powerlaw_wqed_frozen, build_wqed_ansatz, HvaModel, WqedVariant,
};
pub use fit::{fit_exponentials, fit_powerlaw, PowerlawFit};

use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{PauliOperator, StateVector};
use crate::{Error, Result};

/// Lower bound applied to range (`L`) parameters before use.
pub const MIN_RANGE: f64 = 1e-3;

/// Starting value of every variational `L`.
pub const INITIAL_RANGE: f64 = 1.0;

/// Scale of the uniform initial draw: angles and times start in `0.01 * [0, 2 pi)`.
pub const INIT_SCALE: f64 = 0.01;

/// Distance profile of a wQED gate.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    /// `e^{-r/L}` with `L` taken from the gate's second slot.
    Exponential,
    /// Same weight for every pair (the `L -> infinity` limit).
    Uniform,
    /// Fixed weight per distance, `weights[r - 1]`.
    Fixed(Vec<f64>),
}

impl Coupling {
    pub fn weight(&self, r: usize, l: f64) -> f64 {
        match self {
            Coupling::Exponential => (-(r as f64) / l).exp(),
            Coupling::Uniform => 1.0,
            Coupling::Fixed(w) => w[r - 1],
        }
    }

    /// Whether the gate carries an `L` slot after its `T` slot.
    pub fn has_range(&self) -> bool {
        matches!(self, Coupling::Exponential)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    RotX,
    RotY,
    RotZ,
    /// One shared `exp(-i theta Z)` angle on every listed qubit.
    GlobalRotZ,
    Cz,
    /// `exp(-i weight theta X X)`.
    PairXx {
        weight: f64,
    },
    /// `exp(-i T H_XX)` with the flip-flop generator of unit strength.
    WqedXx {
        coupling: Coupling,
    },
    /// `exp(-i T H_I)`; applied as commuting pairwise XX rotations.
    WqedI {
        coupling: Coupling,
    },
    /// `exp(-i theta G)` for a generator with mutually commuting terms.
    HvaTerm {
        generator: PauliOperator,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub slots: Vec<usize>,
}

impl Gate {
    pub fn is_multi_qubit(&self) -> bool {
        !matches!(
            self.kind,
            GateKind::RotX | GateKind::RotY | GateKind::RotZ | GateKind::GlobalRotZ
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|1...1>`, the ground state of `sum Z`.
    AllDown,
    /// `|0101...>`, a ground state of `sum Z Z`.
    Neel,
    /// `(|00> - |11>)/sqrt 2` on pairs `(0,1), (2,3), ...`.
    BellPairs,
    AllZero,
}

impl InitialState {
    pub fn prepare(self, n: usize) -> Result<StateVector> {
        match self {
            InitialState::AllDown => StateVector::basis(n, (1usize << n) - 1),
            InitialState::AllZero => StateVector::zero(n),
            InitialState::Neel => {
                let bits: Vec<bool> = (0..n).map(|q| q % 2 == 1).collect();
                StateVector::from_bits(&bits)
            }
            InitialState::BellPairs => {
                if n % 2 != 0 {
                    return Err(Error::invalid(
                        "n",
                        "Bell-pair state needs an even qubit count",
                    ));
                }
                let h = 1.0 / 2f64.sqrt();
                let pair = [h, 0.0, 0.0, -h].map(|x| num_complex::Complex64::new(x, 0.0));
                let mut amps = vec![num_complex::Complex64::new(1.0, 0.0)];
                for _ in 0..n / 2 {
                    amps = amps
                        .iter()
                        .flat_map(|a| pair.iter().map(move |p| a * p))
                        .collect();
                }
                StateVector::from_amplitudes(amps)
            }
        }
    }
}

/// How a slot gets its starting value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlotInit {
    Uniform,
    Fixed(f64),
    /// `factor` times a draw shared by every slot in the same group.
    Shared {
        group: usize,
        factor: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutEntry {
    pub layer: usize,
    pub role: &'static str,
    pub slots: Range<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub name: String,
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub n_params: usize,
    pub layout: Vec<LayoutEntry>,
    /// Slots clamped to at least [`MIN_RANGE`].
    pub range_slots: Vec<bool>,
    pub init: Vec<SlotInit>,
    pub initial_state: InitialState,
    pub depth: usize,
}

impl Circuit {
    /// Copy of `params` with range slots clamped.
    pub fn clamp(&self, params: &[f64]) -> Vec<f64> {
        params
            .iter()
            .zip(&self.range_slots)
            .map(|(&p, &r)| if r { p.max(MIN_RANGE) } else { p })
            .collect()
    }

    pub fn clamp_slot(&self, slot: usize, value: f64) -> f64 {
        if self.range_slots[slot] {
            value.max(MIN_RANGE)
        } else {
            value
        }
    }

    /// Seeded starting parameters.
    pub fn initial_params<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut shared: std::collections::BTreeMap<usize, f64> = Default::default();
        let mut out = Vec::with_capacity(self.n_params);
        for init in &self.init {
            let v = match *init {
                SlotInit::Uniform => draw(rng),
                SlotInit::Fixed(v) => v,
                SlotInit::Shared { group, factor } => {
                    factor * *shared.entry(group).or_insert_with(|| draw(rng))
                }
            };
            out.push(v);
        }
        out
    }

    /// Index of the first gate reading `slot`.
    pub fn first_gate_of_slot(&self) -> Vec<usize> {
        let mut first = vec![usize::MAX; self.n_params];
        for (g, gate) in self.gates.iter().enumerate() {
            for &s in &gate.slots {
                first[s] = first[s].min(g);
            }
        }
        first
    }

    pub fn count_gates(&self, pred: impl Fn(&GateKind) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(&g.kind)).count()
    }

    pub fn initial(&self) -> Result<StateVector> {
        self.initial_state.prepare(self.n_qubits)
    }

    pub fn with_initial_state(mut self, s: InitialState) -> Self {
        self.initial_state = s;
        self
    }

    /// Every slot used by some gate, and slot metadata sized to `n_params`.
    pub(crate) fn validate(&self) -> Result<()> {
        if self.range_slots.len() != self.n_params || self.init.len() != self.n_params {
            return Err(Error::invalid("circuit", "slot metadata length mismatch"));
        }
        for g in &self.gates {
            if g.slots.iter().any(|&s| s >= self.n_params) {
                return Err(Error::invalid("circuit", "slot index out of range"));
            }
        }
        let first = self.first_gate_of_slot();
        if let Some(s) = first.iter().position(|&g| g == usize::MAX) {
            return Err(Error::invalid("circuit", format!("slot {s} is never used")));
        }
        Ok(())
    }

    pub(crate) fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::DimensionMismatch {
                expected: self.n_params,
                got: params.len(),
            });
        }
        Ok(())
    }
}

fn draw<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    INIT_SCALE * rng.random_range(0.0..std::f64::consts::TAU)
}
