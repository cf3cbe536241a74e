//! Maximising acceptance over unentangled two-register witnesses.
//!
//! With two witness registers the verifier accepts with the product optimum
//! `max <a⊗b|A|a⊗b>`, which can sit well below the top eigenvalue of `A`
//! (the optimum over entangled witnesses). The seesaw here is a heuristic
//! lower bound; the top eigenvalue is a certified upper bound.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::random::{haar_vector, substream};
use crate::statevec::{acceptance_operator, Circuit, Gate, HermitianOperator, RegisterLayout, Statevector};

/// Slack on both sides of the decision thresholds.
pub const DECISION_SLACK: f64 = 1e-9;

/// Qubit counts of the two witness registers; the first is more significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterSplit {
    pub first: usize,
    pub second: usize,
}

impl RegisterSplit {
    pub fn new(first: usize, second: usize) -> Self {
        Self { first, second }
    }

    pub fn from_layout(layout: RegisterLayout) -> Self {
        Self::new(layout.witness1, layout.witness2)
    }

    fn dims(self) -> (usize, usize) {
        (1 << self.first, 1 << self.second)
    }

    fn check(self, a: &HermitianOperator) -> Result<()> {
        if self.first == 0 || self.second == 0 {
            return Err(Error::input("both witness registers need at least one qubit"));
        }
        let (d1, d2) = self.dims();
        if a.dim() != d1 * d2 {
            return Err(Error::input(format!(
                "operator dimension {} does not match registers of {} and {} qubits",
                a.dim(),
                self.first,
                self.second
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedSide {
    /// Fix the second register; the result acts on the first.
    Second,
    /// Fix the first register; the result acts on the second.
    First,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductWitness {
    pub psi1: Statevector,
    pub psi2: Statevector,
    pub value: f64,
    pub iterates: Vec<f64>,
}

impl ProductWitness {
    pub fn iterations(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }

    pub fn product_state(&self) -> Vec<Complex64> {
        crate::statevec::kron(self.psi1.amplitudes(), self.psi2.amplitudes())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionThresholds {
    pub c: f64,
    pub s: f64,
    pub gap_floor: f64,
}

impl DecisionThresholds {
    pub fn new(c: f64, s: f64, gap_floor: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::input(format!("completeness {c} outside (0, 1]")));
        }
        if !(0.0..1.0).contains(&s) {
            return Err(Error::input(format!("soundness {s} outside [0, 1)")));
        }
        if gap_floor.is_nan() || gap_floor <= 0.0 || c - s < gap_floor {
            return Err(Error::input(format!(
                "gap {} is below the floor {gap_floor}",
                c - s
            )));
        }
        Ok(Self { c, s, gap_floor })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeesawSettings {
    pub max_iters: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SeesawSettings {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tol: 1e-10,
            restarts: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub decision: Decision,
    pub product_value: f64,
    pub entangled_value: f64,
}

/// Top eigenvalue of `a` and a unit eigenvector: the best acceptance over
/// all (possibly entangled) witnesses.
pub fn entangled_optimum(a: &HermitianOperator) -> Result<(f64, Statevector)> {
    let (value, v) = a.top_eigenpair();
    Ok((value, Statevector::normalized(v)?))
}

/// Contracts `a` with `fixed` on one register.
///
/// The other register's dimension is `dim(a) / dim(fixed)`.
pub fn reduced_operator(a: &HermitianOperator, fixed: &Statevector, side: FixedSide) -> Result<HermitianOperator> {
    let f = fixed.amplitudes();
    if !a.dim().is_multiple_of(f.len()) || a.dim() == f.len() {
        return Err(Error::input(format!(
            "cannot fix a {}-dimensional register of a {}-dimensional operator",
            f.len(),
            a.dim()
        )));
    }
    let other = a.dim() / f.len();
    let m = a.matrix();
    let reduced = match side {
        FixedSide::Second => {
            let d2 = f.len();
            DMatrix::from_fn(other, other, |i, j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, fk) in f.iter().enumerate() {
                    let row = i * d2 + k;
                    let mut inner = Complex64::new(0.0, 0.0);
                    for (l, fl) in f.iter().enumerate() {
                        inner += m[(row, j * d2 + l)] * fl;
                    }
                    acc += fk.conj() * inner;
                }
                acc
            })
        }
        FixedSide::First => {
            let d2 = other;
            DMatrix::from_fn(other, other, |k, l| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, fi) in f.iter().enumerate() {
                    let row = i * d2 + k;
                    let mut inner = Complex64::new(0.0, 0.0);
                    for (j, fj) in f.iter().enumerate() {
                        inner += m[(row, j * d2 + l)] * fj;
                    }
                    acc += fi.conj() * inner;
                }
                acc
            })
        }
    };
    let reduced = (&reduced + reduced.adjoint()) * Complex64::new(0.5, 0.0);
    HermitianOperator::new(reduced)
}

/// Alternating ascent over product witnesses.
///
/// Runs from `init` (or the top eigenvectors of the marginals of the
/// entangled optimum) plus `settings.restarts` seeded random starts, in
/// parallel, and returns the best run. Ties go to the earliest start.
pub fn seesaw_optimize(
    a: &HermitianOperator,
    split: RegisterSplit,
    init: Option<&ProductWitness>,
    settings: &SeesawSettings,
) -> Result<ProductWitness> {
    split.check(a)?;
    if settings.max_iters == 0 {
        return Err(Error::input("max_iters must be positive"));
    }
    let (d1, d2) = split.dims();
    let first = match init {
        Some(w) => {
            if w.psi1.dim() != d1 || w.psi2.dim() != d2 {
                return Err(Error::input("initial witness does not match the register split"));
            }
            (w.psi1.clone(), w.psi2.clone())
        }
        None => marginal_start(a, d1, d2)?,
    };
    let mut starts = vec![first];
    for r in 0..settings.restarts {
        let mut rng = substream(settings.seed, "seesaw_optimize", r as u64);
        starts.push((
            Statevector::normalized(haar_vector(d1, &mut rng))?,
            Statevector::normalized(haar_vector(d2, &mut rng))?,
        ));
    }
    let runs: Vec<ProductWitness> = starts
        .into_par_iter()
        .map(|(p1, p2)| ascend(a, p1, p2, settings))
        .collect::<Result<_>>()?;
    Ok(best_of(runs))
}

fn best_of(runs: Vec<ProductWitness>) -> ProductWitness {
    let mut iter = runs.into_iter();
    let mut best = iter.next().expect("at least one run");
    for run in iter {
        if run.value > best.value {
            best = run;
        }
    }
    best
}

fn ascend(a: &HermitianOperator, mut psi1: Statevector, mut psi2: Statevector, settings: &SeesawSettings) -> Result<ProductWitness> {
    let mut value = product_value(a, &psi1, &psi2);
    let mut iterates = vec![value];
    for _ in 0..settings.max_iters {
        let (_, v1) = reduced_operator(a, &psi2, FixedSide::Second)?.top_eigenpair();
        psi1 = Statevector::normalized(v1)?;
        let (_, v2) = reduced_operator(a, &psi1, FixedSide::First)?.top_eigenpair();
        psi2 = Statevector::normalized(v2)?;
        let next = product_value(a, &psi1, &psi2);
        iterates.push(next);
        let gain = next - value;
        value = next;
        if gain < settings.tol {
            break;
        }
    }
    Ok(ProductWitness {
        psi1,
        psi2,
        value,
        iterates,
    })
}

fn marginal_start(a: &HermitianOperator, d1: usize, d2: usize) -> Result<(Statevector, Statevector)> {
    let (_, v) = a.top_eigenpair();
    // v reshaped so that row i, column k holds the amplitude of |i>|k>
    let m = DMatrix::from_fn(d1, d2, |i, k| v[i * d2 + k]);
    let rho1 = &m * m.adjoint();
    let rho2 = m.transpose() * m.map(|z| z.conj());
    let (_, t1) = linalg::top_eigenpair(&rho1);
    let (_, t2) = linalg::top_eigenpair(&rho2);
    Ok((
        Statevector::normalized(t1.iter().copied().collect())?,
        Statevector::normalized(t2.iter().copied().collect())?,
    ))
}

fn product_value(a: &HermitianOperator, psi1: &Statevector, psi2: &Statevector) -> f64 {
    a.expectation(&crate::statevec::kron(psi1.amplitudes(), psi2.amplitudes()))
}

/// Best of `samples` seeded random product witnesses.
pub fn random_product_search(a: &HermitianOperator, split: RegisterSplit, samples: usize, seed: u64) -> Result<ProductWitness> {
    const CHUNK: usize = 256;
    split.check(a)?;
    if samples == 0 {
        return Err(Error::input("samples must be positive"));
    }
    let (d1, d2) = split.dims();
    let n_chunks = samples.div_ceil(CHUNK);
    let bests: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, "random_product_search", c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut best = (f64::NEG_INFINITY, Vec::new(), Vec::new());
            for _ in 0..count {
                let v1 = haar_vector(d1, &mut rng);
                let v2 = haar_vector(d2, &mut rng);
                let val = a.expectation(&crate::statevec::kron(&v1, &v2));
                if val > best.0 {
                    best = (val, v1, v2);
                }
            }
            best
        })
        .collect();
    let mut top = 0;
    for (i, b) in bests.iter().enumerate() {
        if b.0 > bests[top].0 {
            top = i;
        }
    }
    let (value, v1, v2) = bests.into_iter().nth(top).expect("at least one chunk");
    Ok(ProductWitness {
        psi1: Statevector::normalized(v1)?,
        psi2: Statevector::normalized(v2)?,
        value,
        iterates: vec![value],
    })
}

/// Three-way verdict for a two-witness verifier.
///
/// Accepts when the seesaw finds a product witness reaching `c`; rejects only
/// when the entangled optimum, an upper bound on every product witness, is
/// below `s`. Everything else is indeterminate. With a single nonempty
/// witness register the two optima coincide.
pub fn decide(circuit: &Circuit, thresholds: &DecisionThresholds, settings: &SeesawSettings) -> Result<DecisionReport> {
    let a = acceptance_operator(circuit)?;
    let (entangled_value, _) = entangled_optimum(&a)?;
    let split = RegisterSplit::from_layout(circuit.layout());
    let product_value = if split.first == 0 || split.second == 0 {
        entangled_value
    } else {
        seesaw_optimize(&a, split, None, settings)?.value
    };
    let decision = if product_value >= thresholds.c - DECISION_SLACK {
        Decision::Accept
    } else if entangled_value < thresholds.s + DECISION_SLACK {
        Decision::Reject
    } else {
        Decision::Indeterminate
    };
    Ok(DecisionReport {
        decision,
        product_value,
        entangled_value,
    })
}

/// Verifier on two one-qubit witnesses accepting exactly on
/// `(|00> + |11>)/sqrt(2)`: its acceptance operator is the projector onto
/// that state.
pub fn bell_projector_circuit() -> Circuit {
    let build = || -> Result<Circuit> {
        Circuit::new(RegisterLayout::new(1, 1, 1))?
            .with(Gate::cx(), &[0, 1])?
            .with(Gate::h(), &[0])?
            .with(Gate::x(), &[0])?
            .with(Gate::x(), &[1])?
            .with(Gate::ccx(), &[0, 1, 2])?
            .with_output(2)
    };
    build().expect("fixed three-qubit circuit is valid")
}

/// Hermitian matrix with prescribed eigenvalues, conjugated by a seeded
/// random unitary.
pub fn operator_with_spectrum(eigenvalues: &[f64], seed: u64) -> Result<HermitianOperator> {
    let d = eigenvalues.len();
    let mut rng = substream(seed, "operator_with_spectrum", 0);
    let g = haar_vector(d * d, &mut rng);
    let raw = DMatrix::from_fn(d, d, |i, j| g[i * d + j]);
    let q = raw.qr().q();
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(d, eigenvalues.iter().map(|&e| Complex64::new(e, 0.0))));
    let m = &q * diag * q.adjoint();
    HermitianOperator::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0))
}
