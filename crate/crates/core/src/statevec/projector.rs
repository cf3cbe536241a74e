use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{inner, l2_norm, qubit_mask, Statevector, NORM_TOLERANCE};
use crate::error::{Error, Result};

/// Probability below which a postselected state is considered meaningless.
pub const NULL_EVENT_THRESHOLD: f64 = 1e-14;

/// A projector on a subset of qubits, identity elsewhere.
///
/// Bitstrings and local vectors are indexed with `qubits[0]` as the most
/// significant bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Projector {
    /// Span of the allowed computational basis strings on `qubits`.
    BasisSubspace {
        qubits: Vec<usize>,
        allowed: BTreeSet<usize>,
    },
    /// `|v><v|` on `qubits`.
    RankOne {
        qubits: Vec<usize>,
        vector: Vec<Complex64>,
    },
}

impl Projector {
    pub fn basis_subspace(qubits: &[usize], allowed: impl IntoIterator<Item = usize>) -> Result<Self> {
        check_qubit_list(qubits)?;
        let allowed: BTreeSet<usize> = allowed.into_iter().collect();
        let dim = 1usize << qubits.len();
        if let Some(&bad) = allowed.iter().find(|&&b| b >= dim) {
            return Err(Error::input(format!(
                "bitstring {bad} does not fit on {} qubit(s)",
                qubits.len()
            )));
        }
        Ok(Projector::BasisSubspace {
            qubits: qubits.to_vec(),
            allowed,
        })
    }

    pub fn rank_one(qubits: &[usize], vector: Vec<Complex64>) -> Result<Self> {
        check_qubit_list(qubits)?;
        if vector.len() != 1 << qubits.len() {
            return Err(Error::input(format!(
                "rank-one vector has {} entries, expected {}",
                vector.len(),
                1usize << qubits.len()
            )));
        }
        let norm = l2_norm(&vector);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::input(format!(
                "rank-one vector is not normalised (norm {norm})"
            )));
        }
        Ok(Projector::RankOne {
            qubits: qubits.to_vec(),
            vector,
        })
    }

    /// `|1><1|` on a single qubit.
    pub fn one(qubit: usize) -> Self {
        Projector::BasisSubspace {
            qubits: vec![qubit],
            allowed: BTreeSet::from([1]),
        }
    }

    pub fn qubits(&self) -> &[usize] {
        match self {
            Projector::BasisSubspace { qubits, .. } | Projector::RankOne { qubits, .. } => qubits,
        }
    }

    /// `I - P` for a basis-subspace projector.
    pub fn complement(&self) -> Option<Projector> {
        match self {
            Projector::BasisSubspace { qubits, allowed } => Some(Projector::BasisSubspace {
                qubits: qubits.clone(),
                allowed: (0..1usize << qubits.len())
                    .filter(|b| !allowed.contains(b))
                    .collect(),
            }),
            Projector::RankOne { .. } => None,
        }
    }

    /// Applies the projector in place without renormalising; returns `||P psi||^2`.
    pub(crate) fn apply_unnormalized(&self, amps: &mut [Complex64], n_qubits: usize) -> f64 {
        let masks: Vec<usize> = self.qubits().iter().map(|&q| qubit_mask(n_qubits, q)).collect();
        let k = masks.len();
        let local_index = |i: usize| -> usize {
            masks
                .iter()
                .enumerate()
                .filter(|(_, &m)| i & m != 0)
                .fold(0, |acc, (pos, _)| acc | 1 << (k - 1 - pos))
        };
        match self {
            Projector::BasisSubspace { allowed, .. } => {
                for (i, a) in amps.iter_mut().enumerate() {
                    if !allowed.contains(&local_index(i)) {
                        *a = Complex64::new(0.0, 0.0);
                    }
                }
            }
            Projector::RankOne { vector, .. } => {
                let all = masks.iter().fold(0, |acc, m| acc | m);
                let offsets: Vec<usize> = (0..1usize << k)
                    .map(|j| {
                        (0..k)
                            .filter(|&pos| j & (1 << (k - 1 - pos)) != 0)
                            .fold(0, |acc, pos| acc | masks[pos])
                    })
                    .collect();
                let mut local = vec![Complex64::new(0.0, 0.0); offsets.len()];
                for base in 0..amps.len() {
                    if base & all != 0 {
                        continue;
                    }
                    for (slot, off) in local.iter_mut().zip(&offsets) {
                        *slot = amps[base | off];
                    }
                    let overlap = inner(vector, &local);
                    for (v, off) in vector.iter().zip(&offsets) {
                        amps[base | off] = v * overlap;
                    }
                }
            }
        }
        amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_range(&self, n_qubits: usize) -> Result<()> {
        if let Some(&q) = self.qubits().iter().find(|&&q| q >= n_qubits) {
            return Err(Error::input(format!(
                "projector qubit {q} out of range for {n_qubits} qubits"
            )));
        }
        Ok(())
    }
}

fn check_qubit_list(qubits: &[usize]) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::input("projector needs at least one qubit"));
    }
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(Error::input(format!("duplicate projector qubit {q}")));
        }
    }
    Ok(())
}

/// Postselects `state` on `proj`: returns `||P psi||^2` and the renormalised
/// conditional state.
pub fn project(state: &Statevector, proj: &Projector) -> Result<(f64, Statevector)> {
    project_named(state, proj, "project")
}

pub(crate) fn project_named(
    state: &Statevector,
    proj: &Projector,
    operation: &'static str,
) -> Result<(f64, Statevector)> {
    proj.check_range(state.n_qubits())?;
    let mut amps = state.amplitudes().to_vec();
    let probability = proj.apply_unnormalized(&mut amps, state.n_qubits());
    if probability < NULL_EVENT_THRESHOLD {
        return Err(Error::NullPostselection {
            operation,
            probability,
        });
    }
    let scale = 1.0 / probability.sqrt();
    for a in &mut amps {
        *a *= scale;
    }
    Ok((probability.min(1.0), Statevector::from_raw(state.n_qubits(), amps)))
}

/// `||P psi||^2` without conditioning (never errors on null events).
pub fn probability(state: &Statevector, proj: &Projector) -> Result<f64> {
    proj.check_range(state.n_qubits())?;
    let mut amps = state.amplitudes().to_vec();
    Ok(proj.apply_unnormalized(&mut amps, state.n_qubits()).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> Statevector {
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let o = Complex64::new(0.0, 0.0);
        Statevector::from_amplitudes(vec![r, o, o, r]).unwrap()
    }

    #[test]
    fn bell_already_in_even_parity_subspace() {
        let p = Projector::basis_subspace(&[0, 1], [0b00, 0b11]).unwrap();
        let (prob, post) = project(&bell(), &p).unwrap();
        assert!((prob - 1.0).abs() < 1e-15);
        assert!(post.max_distance(&bell()) < 1e-15);
    }

    #[test]
    fn bell_is_its_own_rank_one_eigenvector() {
        let p = Projector::rank_one(&[0, 1], bell().into_amplitudes()).unwrap();
        let (prob, post) = project(&bell(), &p).unwrap();
        assert!((prob - 1.0).abs() < 1e-15);
        assert!(post.max_distance(&bell()) < 1e-15);
    }

    #[test]
    fn born_rule_on_bell() {
        let p = Projector::basis_subspace(&[0, 1], [0b00]).unwrap();
        let (prob, post) = project(&bell(), &p).unwrap();
        assert!((prob - 0.5).abs() < 1e-15);
        assert!(post.max_distance(&Statevector::basis(2, 0).unwrap()) < 1e-15);
    }

    #[test]
    fn null_event_is_an_error() {
        let p = Projector::basis_subspace(&[0, 1], [0b01]).unwrap();
        assert!(matches!(
            project(&bell(), &p),
            Err(Error::NullPostselection { .. })
        ));
        assert_eq!(probability(&bell(), &p).unwrap(), 0.0);
    }

    #[test]
    fn malformed_projectors_rejected() {
        assert!(Projector::basis_subspace(&[0], [2]).is_err());
        assert!(Projector::basis_subspace(&[0, 0], [0]).is_err());
        assert!(Projector::rank_one(&[0], vec![Complex64::new(1.0, 0.0); 2]).is_err());
        let p = Projector::one(3);
        assert!(project(&bell(), &p).is_err());
    }

    #[test]
    fn local_order_follows_qubit_list() {
        // |01> on (q0, q1); listing qubits as [1, 0] makes it local string 0b10
        let s = Statevector::basis(2, 0b01).unwrap();
        let p = Projector::basis_subspace(&[1, 0], [0b10]).unwrap();
        assert!((probability(&s, &p).unwrap() - 1.0).abs() < 1e-15);
    }
}
