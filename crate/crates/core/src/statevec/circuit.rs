use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gate::Gate;
use super::state::{check_width, qubit_mask, Statevector};
use crate::error::{Error, Result};

/// Qubit counts of the two witness registers and the ancilla register.
///
/// Witness 1 occupies the lowest qubit indices, then witness 2, then the
/// ancillas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub witness1: usize,
    pub witness2: usize,
    pub ancilla: usize,
}

impl RegisterLayout {
    pub fn new(witness1: usize, witness2: usize, ancilla: usize) -> Self {
        Self {
            witness1,
            witness2,
            ancilla,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.witness1 + self.witness2 + self.ancilla
    }

    pub fn witness_qubits(&self) -> usize {
        self.witness1 + self.witness2
    }

    pub fn ancilla_range(&self) -> std::ops::Range<usize> {
        self.witness_qubits()..self.n_qubits()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Operation {
    pub gate: Gate,
    pub targets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    layout: RegisterLayout,
    output_qubit: usize,
    ops: Vec<Operation>,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Result<Self> {
        check_width(layout.n_qubits())?;
        Ok(Self {
            layout,
            output_qubit: 0,
            ops: Vec::new(),
        })
    }

    pub fn with_output(mut self, qubit: usize) -> Result<Self> {
        self.set_output(qubit)?;
        Ok(self)
    }

    pub fn set_output(&mut self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits() {
            return Err(Error::input(format!(
                "output qubit {qubit} out of range for {} qubits",
                self.n_qubits()
            )));
        }
        self.output_qubit = qubit;
        Ok(())
    }

    pub fn push(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        check_targets(gate.arity(), targets, self.n_qubits())?;
        self.ops.push(Operation {
            gate,
            targets: targets.to_vec(),
        });
        Ok(())
    }

    /// Builder-style [`Circuit::push`].
    pub fn with(mut self, gate: Gate, targets: &[usize]) -> Result<Self> {
        self.push(gate, targets)?;
        Ok(self)
    }

    /// Appends every operation of `other`, whose qubits are relabelled by `map`.
    pub fn append_mapped(&mut self, other: &Circuit, map: impl Fn(usize) -> usize) -> Result<()> {
        for op in &other.ops {
            let targets: Vec<usize> = op.targets.iter().map(|&q| map(q)).collect();
            self.push(op.gate.clone(), &targets)?;
        }
        Ok(())
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.n_qubits()
    }

    pub fn output_qubit(&self) -> usize {
        self.output_qubit
    }

    pub fn operations(&self) -> &[Operation] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Same circuit on a layout with `extra` ancillas appended at the top.
    pub fn widened(&self, extra: usize) -> Result<Circuit> {
        let mut layout = self.layout;
        layout.ancilla += extra;
        check_width(layout.n_qubits())?;
        Ok(Circuit {
            layout,
            output_qubit: self.output_qubit,
            ops: self.ops.clone(),
        })
    }

    /// Serialises to the line-oriented text format accepted by
    /// [`parse_circuit`](super::parse_circuit).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let l = self.layout;
        let _ = writeln!(
            out,
            "registers witness1={} witness2={} ancilla={}",
            l.witness1, l.witness2, l.ancilla
        );
        if self.output_qubit != 0 {
            let _ = writeln!(out, "out {}", self.output_qubit);
        }
        for op in &self.ops {
            out.push_str(op.gate.name());
            if !op.gate.params().is_empty() {
                let angles: Vec<String> = op.gate.params().iter().map(|p| p.to_string()).collect();
                let _ = write!(out, "({})", angles.join(","));
            }
            for t in &op.targets {
                let _ = write!(out, " {t}");
            }
            out.push('\n');
        }
        out
    }
}

fn check_targets(arity: usize, targets: &[usize], n_qubits: usize) -> Result<()> {
    if targets.len() != arity {
        return Err(Error::input(format!(
            "gate acts on {arity} qubit(s) but {} target(s) given",
            targets.len()
        )));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::input(format!(
                "target {t} out of range for {n_qubits} qubits"
            )));
        }
        if targets[..i].contains(&t) {
            return Err(Error::input(format!("duplicate target {t}")));
        }
    }
    Ok(())
}

/// Applies `gate` to `targets` of `state`, returning the new state.
pub fn apply_gate(state: &Statevector, gate: &Gate, targets: &[usize]) -> Result<Statevector> {
    check_targets(gate.arity(), targets, state.n_qubits())?;
    let mut out = state.clone();
    apply_in_place(&mut out, gate, targets);
    Ok(out)
}

pub fn apply_circuit(state: &Statevector, circuit: &Circuit) -> Result<Statevector> {
    if state.n_qubits() != circuit.n_qubits() {
        return Err(Error::input(format!(
            "state has {} qubits but circuit acts on {}",
            state.n_qubits(),
            circuit.n_qubits()
        )));
    }
    let mut out = state.clone();
    run_in_place(&mut out, circuit);
    Ok(out)
}

/// Reversed gate list with each gate replaced by its adjoint.
pub fn inverse_circuit(circuit: &Circuit) -> Circuit {
    Circuit {
        layout: circuit.layout,
        output_qubit: circuit.output_qubit,
        ops: circuit
            .ops
            .iter()
            .rev()
            .map(|op| Operation {
                gate: op.gate.inverse(),
                targets: op.targets.clone(),
            })
            .collect(),
    }
}

/// Runs the circuit's gates on the lowest `circuit.n_qubits()` qubits of a
/// possibly wider state.
pub(crate) fn run_in_place(state: &mut Statevector, circuit: &Circuit) {
    debug_assert!(state.n_qubits() >= circuit.n_qubits());
    for op in &circuit.ops {
        apply_in_place(state, &op.gate, &op.targets);
    }
}

/// Targets are assumed validated.
pub(crate) fn apply_in_place(state: &mut Statevector, gate: &Gate, targets: &[usize]) {
    let n = state.n_qubits();
    let masks: Vec<usize> = targets.iter().map(|&t| qubit_mask(n, t)).collect();
    let all: usize = masks.iter().fold(0, |acc, m| acc | m);
    let k = masks.len();
    let d = 1usize << k;
    // offset of local basis index j; the first target is the local MSB
    let offsets: Vec<usize> = (0..d)
        .map(|j| {
            (0..k)
                .filter(|&pos| j & (1 << (k - 1 - pos)) != 0)
                .fold(0, |acc, pos| acc | masks[pos])
        })
        .collect();
    let m = gate.matrix();
    let amps = state.amplitudes_mut();

    if k == 1 {
        let (m00, m01, m10, m11) = (m[0], m[1], m[2], m[3]);
        let bit = masks[0];
        for base in 0..amps.len() {
            if base & bit != 0 {
                continue;
            }
            let a0 = amps[base];
            let a1 = amps[base | bit];
            amps[base] = m00 * a0 + m01 * a1;
            amps[base | bit] = m10 * a0 + m11 * a1;
        }
        return;
    }

    let mut local = vec![Complex64::new(0.0, 0.0); d];
    for base in 0..amps.len() {
        if base & all != 0 {
            continue;
        }
        for (slot, off) in local.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for (row, off) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, a) in local.iter().enumerate() {
                acc += m[row * d + col] * a;
            }
            amps[base | off] = acc;
        }
    }
}
