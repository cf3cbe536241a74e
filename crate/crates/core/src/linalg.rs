//! Dense Hermitian eigen helpers with deterministic tie-breaking.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Eigenvalues closer than this to the maximum count as the top eigenspace.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Convergence threshold handed to the symmetric QR iteration.
const EIGEN_EPS: f64 = 1e-15;

/// Full eigendecomposition, eigenvalues ascending.
pub fn eigh(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = SymmetricEigen::try_new(m.clone(), EIGEN_EPS, 0)
        .expect("symmetric eigen iteration without an iteration cap converges");
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Largest eigenvalue and a unit eigenvector.
///
/// When the top eigenspace is degenerate the returned vector is the projection
/// of the computational basis vector with the largest overlap onto that
/// eigenspace (lowest index on ties), which makes the choice independent of
/// the basis the solver happened to return. The vector's largest-magnitude
/// entry is made real and positive.
pub fn top_eigenpair(m: &DMatrix<Complex64>) -> (f64, DVector<Complex64>) {
    let (values, vectors) = eigh(m);
    let d = values.len();
    let top = values[d - 1];
    let block: Vec<usize> = (0..d).filter(|&i| values[i] >= top - DEGENERACY_TOLERANCE).collect();

    let mut v = if block.len() == 1 {
        vectors.column(block[0]).into_owned()
    } else {
        // P e_j has squared norm sum_k |V_jk|^2 over the block
        let weight = |j: usize| block.iter().map(|&k| vectors[(j, k)].norm_sqr()).sum::<f64>();
        let mut best = 0;
        let mut best_w = weight(0);
        for j in 1..d {
            let w = weight(j);
            if w > best_w + 1e-12 {
                best = j;
                best_w = w;
            }
        }
        let mut v = DVector::zeros(d);
        for &k in &block {
            let coeff = vectors[(best, k)].conj();
            for r in 0..d {
                v[r] += vectors[(r, k)] * coeff;
            }
        }
        v
    };
    normalize_phase(&mut v);
    // Rayleigh quotient of the returned vector
    let value = (v.adjoint() * m * &v)[(0, 0)].re;
    (value, v)
}

/// Unit-normalises `v` and rotates its global phase so the first entry of
/// largest magnitude is real and positive.
pub fn normalize_phase(v: &mut DVector<Complex64>) {
    let norm = v.norm();
    if norm > 0.0 {
        *v /= Complex64::new(norm, 0.0);
    }
    let mut pivot = 0;
    for i in 1..v.len() {
        if v[i].norm() > v[pivot].norm() + 1e-12 {
            pivot = i;
        }
    }
    let p = v[pivot];
    if p.norm() > 0.0 {
        let phase = p.conj() / p.norm();
        *v *= phase;
    }
}

/// `max |M - M^†|`.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projector_spectrum() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        let (val, vec) = top_eigenpair(&m);
        assert!((val - 1.0).abs() < 1e-15);
        assert!((vec[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn scalar_operator_picks_first_basis_vector() {
        let m = DMatrix::<Complex64>::identity(4, 4) * Complex64::new(0.5, 0.0);
        let (val, vec) = top_eigenpair(&m);
        assert!((val - 0.5).abs() < 1e-15);
        assert!((vec[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn degenerate_choice_is_basis_independent() {
        // top eigenspace span{|1>, |2>} with |2> weighted heavier in e_2 overlap
        let mut m = DMatrix::<Complex64>::zeros(3, 3);
        m[(1, 1)] = Complex64::new(1.0, 0.0);
        m[(2, 2)] = Complex64::new(1.0, 0.0);
        let (_, v) = top_eigenpair(&m);
        assert!((v[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
