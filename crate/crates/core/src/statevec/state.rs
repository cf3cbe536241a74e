use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MAX_QUBITS;

/// Norm tolerance for states handed across the public API.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Normalised pure state on `n_qubits` qubits.
///
/// Qubit 0 is the most significant bit of the amplitude index, so the basis
/// state `|q0 q1 ... q_{n-1}>` lives at index `q0 * 2^(n-1) + ... + q_{n-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn basis(n_qubits: usize, basis_index: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        if basis_index >= dim {
            return Err(Error::input(format!(
                "basis index {basis_index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[basis_index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// All-zero computational basis state.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Builds a state from amplitudes that must already be normalised within
    /// [`NORM_TOLERANCE`]. The stored vector is rescaled to unit norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = width_of(amplitudes.len())?;
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::input(format!(
                "amplitudes are not normalised (norm {norm})"
            )));
        }
        let mut state = Self {
            n_qubits,
            amplitudes,
        };
        state.rescale(norm);
        Ok(state)
    }

    /// Builds a state from an arbitrary nonzero vector by normalising it.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = width_of(amplitudes.len())?;
        let norm = l2_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::input("cannot normalise a zero or non-finite vector"));
        }
        let mut state = Self {
            n_qubits,
            amplitudes,
        };
        state.rescale(norm);
        Ok(state)
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `self ⊗ other`, with `self` on the lower (more significant) qubits.
    pub fn tensor(&self, other: &Statevector) -> Result<Statevector> {
        check_width(self.n_qubits + other.n_qubits)?;
        let amplitudes = kron(&self.amplitudes, &other.amplitudes);
        Ok(Statevector::from_raw(
            self.n_qubits + other.n_qubits,
            amplitudes,
        ))
    }

    /// Probability of reading `1` on `qubit`.
    pub fn probability_one(&self, qubit: usize) -> f64 {
        let mask = self.mask(qubit);
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Largest componentwise distance to `other`.
    pub fn max_distance(&self, other: &Statevector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Index mask of `qubit` under the most-significant-first convention.
    pub fn mask(&self, qubit: usize) -> usize {
        qubit_mask(self.n_qubits, qubit)
    }

    /// Leaves vectors that are unit to machine precision untouched so that
    /// serialised states read back bit for bit.
    fn rescale(&mut self, norm: f64) {
        if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            return;
        }
        let scale = 1.0 / norm;
        for a in &mut self.amplitudes {
            *a *= scale;
        }
    }
}

pub(crate) fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    1usize << (n_qubits - 1 - qubit)
}

pub(crate) fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::input("a register needs at least one qubit"));
    }
    if n_qubits > MAX_QUBITS {
        return Err(Error::Resource(format!(
            "{n_qubits} qubits exceeds the simulator capacity of {MAX_QUBITS}"
        )));
    }
    Ok(())
}

fn width_of(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::input(format!(
            "amplitude count {len} is not a power of two of at least 2"
        )));
    }
    let n = len.trailing_zeros() as usize;
    check_width(n)?;
    Ok(n)
}

pub(crate) fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x * y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_states() {
        let s = Statevector::basis(1, 0).unwrap();
        assert_eq!(s.amplitudes(), &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);

        let s = Statevector::basis(2, 3).unwrap();
        let expect: Vec<_> = [0.0, 0.0, 0.0, 1.0]
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        assert_eq!(s.amplitudes(), expect.as_slice());
    }

    #[test]
    fn degenerate_bases_rejected() {
        assert!(matches!(Statevector::basis(0, 0), Err(Error::Input(_))));
        assert!(matches!(Statevector::basis(2, 4), Err(Error::Input(_))));
        assert!(matches!(
            Statevector::basis(MAX_QUBITS + 1, 0),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn unnormalised_amplitudes_rejected() {
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(Statevector::from_amplitudes(v.clone()).is_err());
        let s = Statevector::normalized(v).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!(Statevector::normalized(vec![Complex64::new(0.0, 0.0); 2]).is_err());
        assert!(Statevector::normalized(vec![Complex64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        // |10> on two qubits
        let s = Statevector::basis(2, 2).unwrap();
        assert_eq!(s.probability_one(0), 1.0);
        assert_eq!(s.probability_one(1), 0.0);
    }

    #[test]
    fn tensor_ordering() {
        let one = Statevector::basis(1, 1).unwrap();
        let zero = Statevector::basis(1, 0).unwrap();
        let s = one.tensor(&zero).unwrap();
        assert_eq!(s, Statevector::basis(2, 2).unwrap());
    }
}
