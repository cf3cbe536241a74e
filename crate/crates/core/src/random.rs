//! Seeded random states and circuits.
//!
//! Every stochastic routine draws from [`substream`], keyed by a run seed, an
//! operation name and an index, so results are reproducible bit for bit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::statevec::{apply_circuit, inverse_circuit, Circuit, Gate, GateKind, RegisterLayout, Statevector};

pub type StreamRng = ChaCha8Rng;

/// Deterministic generator for `(seed, operation, index)`.
pub fn substream(seed: u64, operation: &str, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(operation.as_bytes()));
    rng.set_stream(index);
    rng
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Unit vector of dimension `dim` drawn from the unitarily invariant measure.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

pub fn random_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Statevector> {
    Statevector::normalized(haar_vector(1 << n_qubits, rng))
}

/// Random circuit over the full gate set with `n_gates` gates.
pub fn random_circuit<R: Rng + ?Sized>(
    layout: RegisterLayout,
    n_gates: usize,
    rng: &mut R,
) -> Result<Circuit> {
    let mut circuit = Circuit::new(layout)?;
    let n = layout.n_qubits();
    let kinds: Vec<GateKind> = GateKind::ALL.into_iter().filter(|k| k.arity() <= n).collect();
    for _ in 0..n_gates {
        let kind = kinds[rng.random_range(0..kinds.len())];
        let params: Vec<f64> = (0..kind.param_count())
            .map(|_| rng.random_range(-PI..PI))
            .collect();
        let mut targets = Vec::with_capacity(kind.arity());
        while targets.len() < kind.arity() {
            let q = rng.random_range(0..n);
            if !targets.contains(&q) {
                targets.push(q);
            }
        }
        circuit.push(Gate::new(kind, &params)?, &targets)?;
    }
    let out = rng.random_range(0..n);
    circuit.set_output(out)?;
    Ok(circuit)
}

/// `psi1 ⊗ psi2 ⊗ |0^m>` with Haar-random witness registers.
pub fn random_product_input<R: Rng + ?Sized>(layout: RegisterLayout, rng: &mut R) -> Result<Statevector> {
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for w in [layout.witness1, layout.witness2] {
        if w > 0 {
            amps = crate::statevec::kron(&amps, &haar_vector(1 << w, rng));
        }
    }
    let mut zero = vec![Complex64::new(0.0, 0.0); 1 << layout.ancilla];
    zero[0] = Complex64::new(1.0, 0.0);
    Statevector::normalized(crate::statevec::kron(&amps, &zero))
}

/// Random input on which `circuit` outputs `1` with probability exactly
/// `p` (up to rounding): a mix of preimages of random states with the output
/// qubit fixed to `1` and to `0`. Ancillas are not kept clean.
pub fn input_with_acceptance<R: Rng + ?Sized>(circuit: &Circuit, p: f64, rng: &mut R) -> Result<Statevector> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("probability {p} outside [0, 1]")));
    }
    let n = circuit.n_qubits();
    let inverse = inverse_circuit(circuit);
    let mask = Statevector::zero(n)?.mask(circuit.output_qubit());
    let branch = |want_one: bool, rng: &mut R| -> Result<Vec<Complex64>> {
        let mut v = haar_vector(1 << n, rng);
        for (i, a) in v.iter_mut().enumerate() {
            if (i & mask != 0) != want_one {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let image = Statevector::normalized(v)?;
        Ok(apply_circuit(&image, &inverse)?.into_amplitudes())
    };
    let one = branch(true, rng)?;
    let zero = branch(false, rng)?;
    let (s1, s0) = (p.sqrt(), (1.0 - p).sqrt());
    Statevector::normalized(one.iter().zip(&zero).map(|(a, b)| a * s1 + b * s0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let a: u64 = substream(7, "op", 0).random();
        let b: u64 = substream(7, "op", 0).random();
        let c: u64 = substream(7, "op", 1).random();
        let d: u64 = substream(7, "other", 0).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn exact_acceptance_inputs() {
        let layout = RegisterLayout::new(2, 1, 1);
        let mut rng = substream(3, "t", 0);
        let c = random_circuit(layout, 25, &mut rng).unwrap();
        for p in [0.0, 0.3, 1.0] {
            let psi = input_with_acceptance(&c, p, &mut rng).unwrap();
            let got = crate::statevec::output_probability(&c, &psi).unwrap();
            assert!((got - p).abs() < 1e-12);
        }
    }

    #[test]
    fn product_input_has_clean_ancillas() {
        let layout = RegisterLayout::new(2, 1, 2);
        let s = random_product_input(layout, &mut substream(1, "t", 0)).unwrap();
        assert_eq!(s.n_qubits(), 5);
        for (i, a) in s.amplitudes().iter().enumerate() {
            if i & 0b11 != 0 {
                assert_eq!(*a, Complex64::new(0.0, 0.0));
            }
        }
    }
}
