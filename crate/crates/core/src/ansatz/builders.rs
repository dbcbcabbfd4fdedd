use serde::{Deserialize, Serialize};

use super::fit::fit_powerlaw;
use super::{
    Circuit, Coupling, Gate, GateKind, InitialState, LayoutEntry, SlotInit, INITIAL_RANGE,
};
use crate::engine::{Pauli, PauliOperator, PauliString};
use crate::hamiltonians::{bonds, total_z, Boundary};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WqedVariant {
    Xx,
    I,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HvaModel {
    Tfim,
    Xxz,
}

struct Builder {
    n: usize,
    gates: Vec<Gate>,
    layout: Vec<LayoutEntry>,
    range_slots: Vec<bool>,
    init: Vec<SlotInit>,
}

impl Builder {
    fn new(n: usize, depth: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(
                "n",
                format!("need at least 2 qubits, got {n}"),
            ));
        }
        if depth < 1 {
            return Err(Error::invalid("depth", "must be at least 1"));
        }
        Ok(Self {
            n,
            gates: Vec::new(),
            layout: Vec::new(),
            range_slots: Vec::new(),
            init: Vec::new(),
        })
    }

    fn slot(&mut self, init: SlotInit, range: bool) -> usize {
        self.init.push(init);
        self.range_slots.push(range);
        self.init.len() - 1
    }

    fn next_slot(&self) -> usize {
        self.init.len()
    }

    fn mark(&mut self, layer: usize, role: &'static str, start: usize) {
        let end = self.next_slot();
        self.layout.push(LayoutEntry {
            layer,
            role,
            slots: start..end,
        });
    }

    fn gate(&mut self, kind: GateKind, qubits: Vec<usize>, slots: Vec<usize>) {
        self.gates.push(Gate {
            kind,
            qubits,
            slots,
        });
    }

    fn all(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    /// A wQED gate; `range` gives the initial `L` when the coupling is exponential.
    fn wqed(
        &mut self,
        variant: WqedVariant,
        coupling: Coupling,
        t: SlotInit,
        range: f64,
        layer: usize,
    ) {
        let start = self.next_slot();
        let mut slots = vec![self.slot(t, false)];
        if coupling.has_range() {
            slots.push(self.slot(SlotInit::Fixed(range), true));
        }
        let kind = match variant {
            WqedVariant::Xx => GateKind::WqedXx { coupling },
            WqedVariant::I => GateKind::WqedI { coupling },
        };
        let q = self.all();
        self.gate(kind, q, slots);
        self.mark(layer, "entangler", start);
    }

    fn rotation(&mut self, global: bool, layer: usize) {
        let start = self.next_slot();
        if global {
            let s = self.slot(SlotInit::Uniform, false);
            let q = self.all();
            self.gate(GateKind::GlobalRotZ, q, vec![s]);
        } else {
            for q in 0..self.n {
                let s = self.slot(SlotInit::Uniform, false);
                self.gate(GateKind::RotZ, vec![q], vec![s]);
            }
        }
        self.mark(layer, "rotation", start);
    }

    fn single_layer(&mut self, kind: GateKind, layer: usize, role: &'static str) {
        let start = self.next_slot();
        for q in 0..self.n {
            let s = self.slot(SlotInit::Uniform, false);
            self.gate(kind.clone(), vec![q], vec![s]);
        }
        self.mark(layer, role, start);
    }

    fn hva_term(&mut self, generator: PauliOperator, layer: usize, role: &'static str) {
        let start = self.next_slot();
        let s = self.slot(SlotInit::Uniform, false);
        let q = generator.support_qubits();
        self.gate(GateKind::HvaTerm { generator }, q, vec![s]);
        self.mark(layer, role, start);
    }

    fn finish(self, name: String, initial_state: InitialState, depth: usize) -> Result<Circuit> {
        let c = Circuit {
            name,
            n_qubits: self.n,
            n_params: self.init.len(),
            gates: self.gates,
            layout: self.layout,
            range_slots: self.range_slots,
            init: self.init,
            initial_state,
            depth,
        };
        c.validate()?;
        Ok(c)
    }
}

/// `depth` layers of `[W(T, L); rotations]`, entangler first.
///
/// Per-qubit Rz layers give `N + 2` parameters per layer, a global Rz gives 3.
pub fn build_wqed_ansatz(
    variant: WqedVariant,
    n: usize,
    depth: usize,
    global_rotation: bool,
) -> Result<Circuit> {
    let mut b = Builder::new(n, depth)?;
    for layer in 0..depth {
        b.wqed(
            variant,
            Coupling::Exponential,
            SlotInit::Uniform,
            INITIAL_RANGE,
            layer,
        );
        b.rotation(global_rotation, layer);
    }
    let name = match variant {
        WqedVariant::Xx => "wqed_xx",
        WqedVariant::I => "wqed_i",
    };
    b.finish(name.into(), InitialState::AllDown, depth)
}

/// `n_exp` Ising wQED gates per layer initialized from an exponential fit of
/// `1/r^alpha` over `r in [1, n-1]`, then a global Rz.
///
/// Layer `l` starts at `T_k = tau_l J_k` with one shared draw `tau_l`, and
/// `L_k` at the fitted ranges; all of them stay variational.
pub fn build_powerlaw_wqed(n: usize, depth: usize, alpha: f64, n_exp: usize) -> Result<Circuit> {
    let mut b = Builder::new(n, depth)?;
    let fit = fit_powerlaw(alpha, n - 1, n_exp)?;
    for layer in 0..depth {
        for &(j, l) in &fit.terms {
            b.wqed(
                WqedVariant::I,
                Coupling::Exponential,
                SlotInit::Shared {
                    group: layer,
                    factor: j,
                },
                l,
                layer,
            );
        }
        b.rotation(true, layer);
    }
    b.finish("powerlaw_wqed".into(), InitialState::AllDown, depth)
}

/// Power-law layers with the fitted profile frozen: one gate per layer with
/// pair weight `sum_k J_k e^{-r/L_k}` and only its time variational.
pub fn build_powerlaw_wqed_frozen(
    n: usize,
    depth: usize,
    alpha: f64,
    n_exp: usize,
) -> Result<Circuit> {
    let mut b = Builder::new(n, depth)?;
    let fit = fit_powerlaw(alpha, n - 1, n_exp)?;
    let weights: Vec<f64> = (1..n)
        .map(|r| {
            fit.terms
                .iter()
                .map(|&(j, l)| j * (-(r as f64) / l).exp())
                .sum()
        })
        .collect();
    for layer in 0..depth {
        b.wqed(
            WqedVariant::I,
            Coupling::Fixed(weights.clone()),
            SlotInit::Uniform,
            0.0,
            layer,
        );
        b.rotation(true, layer);
    }
    b.finish("powerlaw_wqed_frozen".into(), InitialState::AllDown, depth)
}

/// wQED layers with uniform all-to-all coupling; only `T` is variational.
pub fn build_all_to_all(
    variant: WqedVariant,
    n: usize,
    depth: usize,
    global_rotation: bool,
) -> Result<Circuit> {
    let mut b = Builder::new(n, depth)?;
    for layer in 0..depth {
        b.wqed(variant, Coupling::Uniform, SlotInit::Uniform, 0.0, layer);
        b.rotation(global_rotation, layer);
    }
    b.finish("all_to_all".into(), InitialState::AllDown, depth)
}

/// CZ ring `(0,1), ..., (n-1, 0)`; a single CZ for two qubits.
fn cz_ring(n: usize) -> Vec<(usize, usize)> {
    bonds(n, Boundary::Periodic)
}

/// Per layer: `Rz Rx Rz` on every qubit, then a CZ ring.
pub fn build_hea(n: usize, depth: usize) -> Result<Circuit> {
    let mut b = Builder::new(n, depth)?;
    for layer in 0..depth {
        let start = b.next_slot();
        for q in 0..n {
            for kind in [GateKind::RotZ, GateKind::RotX, GateKind::RotZ] {
                let s = b.slot(SlotInit::Uniform, false);
                b.gate(kind, vec![q], vec![s]);
            }
        }
        b.mark(layer, "rotation", start);
        for (i, j) in cz_ring(n) {
            b.gate(GateKind::Cz, vec![i, j], vec![]);
        }
    }
    b.finish("hea".into(), InitialState::AllDown, depth)
}

/// Links `(i, i+1)` starting at `first`, with the wrap link for even chains.
fn links(n: usize, first: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = first;
    while i + 1 < n {
        out.push((i, i + 1));
        i += 2;
    }
    if first == 1 && n % 2 == 0 && n > 2 {
        out.push((n - 1, 0));
    }
    out
}

/// Per layer: Ry, CZ on `(0,1),(2,3),...`, Ry, CZ on `(1,2),(3,4),...` with
/// the wrap link; one trailing Ry layer.
pub fn build_brick_layer(n: usize, depth: usize) -> Result<Circuit> {
    let mut b = Builder::new(n, depth)?;
    for layer in 0..depth {
        b.single_layer(GateKind::RotY, layer, "rotation_a");
        for (i, j) in links(n, 0) {
            b.gate(GateKind::Cz, vec![i, j], vec![]);
        }
        b.single_layer(GateKind::RotY, layer, "rotation_b");
        for (i, j) in links(n, 1) {
            b.gate(GateKind::Cz, vec![i, j], vec![]);
        }
    }
    b.single_layer(GateKind::RotY, depth, "final_rotation");
    b.finish("brick_layer".into(), InitialState::AllDown, depth)
}

fn pair_sum(n: usize, links: &[(usize, usize)], p: Pauli, w: f64) -> Result<PauliOperator> {
    PauliOperator::new(
        n,
        links.iter().map(|&(i, j)| {
            (
                w,
                PauliString::from_sparse(n, &[(i, p), (j, p)]).expect("in range"),
            )
        }),
    )
}

/// Hamiltonian variational ansatz.
///
/// TFIM: `exp(-i phi H_xx)` then `exp(-i theta H_z)` per layer, from the
/// all-down state. XXZ: xx, yy, zz terms on the links `(1,2), (3,4), ...,
/// (n-1, 0)`, then on `(0,1), (2,3), ...`, starting from Bell pairs on the
/// latter.
pub fn build_hva(model: HvaModel, n: usize, depth: usize) -> Result<Circuit> {
    let mut b = Builder::new(n, depth)?;
    match model {
        HvaModel::Tfim => {
            let hxx = pair_sum(n, &bonds(n, Boundary::Open), Pauli::X, -1.0)?;
            let hz = total_z(n)?;
            for layer in 0..depth {
                b.hva_term(hxx.clone(), layer, "xx");
                b.hva_term(hz.clone(), layer, "z");
            }
            b.finish("hva".into(), InitialState::AllDown, depth)
        }
        HvaModel::Xxz => {
            if n % 2 != 0 {
                return Err(Error::invalid("n", "XXZ HVA needs an even qubit count"));
            }
            let mut odd = links(n, 1);
            if n == 2 {
                odd.push((1, 0));
            }
            let even = links(n, 0);
            for layer in 0..depth {
                for (set, roles) in [
                    (&odd, ["odd_xx", "odd_yy", "odd_zz"]),
                    (&even, ["even_xx", "even_yy", "even_zz"]),
                ] {
                    for (p, role) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().zip(roles) {
                        b.hva_term(pair_sum(n, set, p, 1.0)?, layer, role);
                    }
                }
            }
            b.finish("hva".into(), InitialState::BellPairs, depth)
        }
    }
}
