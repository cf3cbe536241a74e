use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::circuit::{run_in_place, Circuit};
use super::state::{qubit_mask, Statevector};
use crate::error::{Error, Result};
use crate::linalg;

/// Hermiticity tolerance on `max |M - M^†|`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Largest tolerated ancilla weight for acceptance-probability inputs.
pub const ANCILLA_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<Complex64>,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::input(format!(
                "operator must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect >= HERMITIAN_TOLERANCE {
            return Err(Error::input(format!("operator is not Hermitian (defect {defect:e})")));
        }
        Ok(Self {
            matrix: symmetrize(matrix),
        })
    }

    /// `|v><v|`.
    pub fn projector(v: &[Complex64]) -> Self {
        let v = DVector::from_column_slice(v);
        Self {
            matrix: &v * v.adjoint(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// `<v|M|v>` (real part).
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        assert_eq!(v.len(), self.dim(), "vector dimension mismatch");
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            let mut row = Complex64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                row += self.matrix[(i, j)] * vj;
            }
            acc += v[i].conj() * row;
        }
        acc.re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigh(&self.matrix).0
    }

    /// Largest eigenvalue with a deterministic unit eigenvector.
    pub fn top_eigenpair(&self) -> (f64, Vec<Complex64>) {
        let (value, v) = linalg::top_eigenpair(&self.matrix);
        (value, v.iter().copied().collect())
    }

    /// `A ⊗ B` with `self` on the more significant factor.
    pub fn kron(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix)
    }
}

fn symmetrize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Probability that `circuit` reports `1` on its output qubit for `input`,
/// which must carry `|0^m>` on the ancilla register.
pub fn acceptance_probability(circuit: &Circuit, input: &Statevector) -> Result<f64> {
    check_ancilla_zero(circuit, input)?;
    output_probability(circuit, input)
}

/// Probability of output `1` for an arbitrary pure input on the circuit's qubits.
pub fn output_probability(circuit: &Circuit, input: &Statevector) -> Result<f64> {
    if input.n_qubits() != circuit.n_qubits() {
        return Err(Error::input(format!(
            "state has {} qubits but circuit acts on {}",
            input.n_qubits(),
            circuit.n_qubits()
        )));
    }
    let mut state = input.clone();
    run_in_place(&mut state, circuit);
    Ok(state.probability_one(circuit.output_qubit()).min(1.0))
}

fn check_ancilla_zero(circuit: &Circuit, input: &Statevector) -> Result<()> {
    let m = circuit.layout().ancilla;
    if m == 0 || input.n_qubits() != circuit.n_qubits() {
        return Ok(());
    }
    let low = (1usize << m) - 1;
    let stray: f64 = input
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i & low != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if stray > ANCILLA_TOLERANCE {
        return Err(Error::input(format!(
            "ancilla register is not |0^{m}> (stray norm {stray:e})"
        )));
    }
    Ok(())
}

/// The operator `A` on the witness registers with
/// `<v|A|v> = acceptance_probability(circuit, v ⊗ |0^m>)`.
///
/// Column `j` is obtained by running the circuit on `|j>|0^m>` and keeping
/// the output-one branch; `A` is the Gram matrix of those branches.
pub fn acceptance_operator(circuit: &Circuit) -> Result<HermitianOperator> {
    let layout = circuit.layout();
    let w = layout.witness_qubits();
    if w == 0 {
        return Err(Error::input("circuit has no witness qubits"));
    }
    let n = circuit.n_qubits();
    let m = layout.ancilla;
    let dim = 1usize << w;
    let out_mask = qubit_mask(n, circuit.output_qubit());

    let branches: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut state = Statevector::basis(n, j << m).expect("index within register");
            run_in_place(&mut state, circuit);
            state
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(i, _)| i & out_mask != 0)
                .map(|(_, a)| *a)
                .collect()
        })
        .collect();

    let mut matrix = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let g: Complex64 = branches[i]
                .iter()
                .zip(&branches[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            matrix[(i, j)] = g;
            matrix[(j, i)] = g.conj();
        }
    }
    Ok(HermitianOperator { matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::{Gate, RegisterLayout};
    use std::f64::consts::PI;

    fn ry_on_output(theta: f64) -> Circuit {
        Circuit::new(RegisterLayout::new(1, 0, 0))
            .unwrap()
            .with(Gate::ry(theta), &[0])
            .unwrap()
    }

    #[test]
    fn deterministic_acceptor_and_rejector() {
        let c = Circuit::new(RegisterLayout::new(1, 0, 0)).unwrap();
        let one = Statevector::basis(1, 1).unwrap();
        let zero = Statevector::basis(1, 0).unwrap();
        assert_eq!(acceptance_probability(&c, &one).unwrap(), 1.0);
        assert_eq!(acceptance_probability(&c, &zero).unwrap(), 0.0);
    }

    #[test]
    fn ry_closed_form() {
        let p = acceptance_probability(&ry_on_output(PI / 3.0), &Statevector::zero(1).unwrap()).unwrap();
        assert!((p - 0.25).abs() < 1e-15);
    }

    #[test]
    fn identity_operator_is_projector() {
        let c = Circuit::new(RegisterLayout::new(1, 0, 0)).unwrap();
        let a = acceptance_operator(&c).unwrap();
        assert_eq!(a.entry(0, 0), Complex64::new(0.0, 0.0));
        assert_eq!(a.entry(1, 1), Complex64::new(1.0, 0.0));
        assert_eq!(a.entry(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn ry_operator_diagonal_and_spectrum() {
        // output is the witness qubit itself: A = RY^† |1><1| RY is a rank-one
        // projector whose diagonal carries sin^2 and cos^2 of theta/2
        let theta = 1.1;
        let a = acceptance_operator(&ry_on_output(theta)).unwrap();
        let (s, c) = (theta / 2.0).sin_cos();
        assert!((a.entry(0, 0).re - s * s).abs() < 1e-15);
        assert!((a.entry(1, 1).re - c * c).abs() < 1e-15);
        let ev = a.eigenvalues();
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);

        // rotating an ancilla output instead makes A = sin^2(theta/2) I
        let c2 = Circuit::new(RegisterLayout::new(1, 0, 1))
            .unwrap()
            .with_output(1)
            .unwrap()
            .with(Gate::ry(theta), &[1])
            .unwrap();
        let ev = acceptance_operator(&c2).unwrap().eigenvalues();
        assert!(ev.iter().all(|e| (e - s * s).abs() < 1e-14));
    }

    #[test]
    fn dirty_ancilla_rejected() {
        let c = Circuit::new(RegisterLayout::new(1, 0, 1)).unwrap();
        let s = Statevector::basis(2, 1).unwrap();
        assert!(matches!(acceptance_probability(&c, &s), Err(Error::Input(_))));
        assert!(output_probability(&c, &s).is_ok());
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(HermitianOperator::new(m).is_err());
    }
}
