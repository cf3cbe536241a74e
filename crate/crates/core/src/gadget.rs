//! The postselection gap-amplification gadget.
//!
//! Given a verifier circuit `Q` with output qubit `o` and an input `|psi>`,
//! the gadget appends a control qubit `c` and a copy qubit `k` (both `|0>`,
//! at the two highest indices) and runs:
//!
//! 1. `Q` on the original qubits,
//! 2. `CX(o -> k)`,
//! 3. `Q^-1`,
//! 4. `c <- (t|1> - |0>) / sqrt(1+t^2)`,
//! 5. `k <- R k` with `R|0> = (|0> + t|1>)/sqrt(1+t^2)`, `R|1> = (|1> - t|0>)/sqrt(1+t^2)`,
//! 6. postselect `(c, k)` on `span{|00>, |11>}`,
//! 7. accept on `(|00> + |11>)/sqrt(2)`.
//!
//! `t` is the rotation parameter (`epsilon` for a completeness-one verifier,
//! `delta` for the completeness `1 - epsilon'` variant). The conditional
//! acceptance probability depends on the input only through
//! `p_x = Pr[o = 1]`; [`predict_gadget`] gives it in closed form.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{
    self, inverse_circuit, output_probability, project_named, run_in_place, Circuit, Gate, Projector,
    RegisterLayout, Statevector,
};

/// Conditional acceptance probabilities above this count as accept; the
/// midpoint between the completeness-one value and the soundness limit 1/2.
pub const SOUNDNESS_THRESHOLD: f64 = 0.75;

/// `p_x` within this distance of 0 or 1 leaves the orthogonal branch with no weight.
pub const DEGENERATE_PX_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GadgetVariant {
    Protocol1,
    Protocol3,
}

impl GadgetVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            GadgetVariant::Protocol1 => "protocol1",
            GadgetVariant::Protocol3 => "protocol3",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetParams {
    pub variant: GadgetVariant,
    pub rotation: f64,
    pub r_exponent: Option<u32>,
}

impl GadgetParams {
    pub fn new(variant: GadgetVariant, rotation: f64) -> Result<Self> {
        if !(rotation > 0.0 && rotation < 1.0) {
            return Err(Error::input(format!("rotation {rotation} outside (0, 1)")));
        }
        Ok(Self {
            variant,
            rotation,
            r_exponent: None,
        })
    }

    pub fn protocol1(epsilon: f64) -> Result<Self> {
        Self::new(GadgetVariant::Protocol1, epsilon)
    }

    pub fn protocol3(delta: f64) -> Result<Self> {
        Self::new(GadgetVariant::Protocol3, delta)
    }

    /// `epsilon = 2^(-10 r)`.
    pub fn protocol1_from_r(r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::input("r must be positive"));
        }
        let epsilon = (-10.0 * r as f64).exp2();
        let mut params = Self::protocol1(epsilon)?;
        params.r_exponent = Some(r);
        Ok(params)
    }
}

impl Default for GadgetParams {
    fn default() -> Self {
        Self::protocol1_from_r(1).expect("r = 1 is valid")
    }
}

/// Indices of the two qubits the gadget appends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetQubits {
    pub control: usize,
    pub copy: usize,
}

/// Amplitude decomposition of the uncomputed state after steps 1-3.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub p_x: f64,
    pub completeness_error: f64,
    /// Normalised component of `|f1>` orthogonal to the input; `None` when
    /// `p_x` is 0 or 1 and that branch carries no weight.
    pub perp_state: Option<Statevector>,
    /// `|<psi|perp>|`, zero when `perp_state` is undefined.
    pub perp_overlap: f64,
    pub residual_f1: f64,
    pub residual_f0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetOutcome {
    pub variant: GadgetVariant,
    pub rotation: f64,
    pub p_x: f64,
    pub p_post: f64,
    pub p_accept: f64,
    pub predicted_p_accept: f64,
    pub predicted_p_post: f64,
    pub discrepancy: f64,
    pub l_bound_exponent: f64,
}

impl GadgetOutcome {
    pub fn accepts(&self) -> bool {
        self.p_accept > SOUNDNESS_THRESHOLD
    }
}

/// Builds the extended circuit for steps 1-5. The result has two extra
/// ancillas and keeps the original output qubit index.
pub fn gadget_circuit(circuit: &Circuit, rotation: f64) -> Result<(Circuit, GadgetQubits)> {
    let n = circuit.n_qubits();
    let mut ext = circuit.widened(2)?;
    let qubits = GadgetQubits {
        control: n,
        copy: n + 1,
    };
    ext.push(Gate::cx(), &[circuit.output_qubit(), qubits.copy])?;
    ext.append_mapped(&inverse_circuit(circuit), |q| q)?;
    let half = rotation.atan();
    // RY(2(pi - a))|0> = -cos(a)|0> + sin(a)|1>
    ext.push(Gate::ry(2.0 * (PI - half)), &[qubits.control])?;
    // RY(2a) = [[1, -t], [t, 1]] / sqrt(1 + t^2)
    ext.push(Gate::ry(2.0 * half), &[qubits.copy])?;
    Ok((ext, qubits))
}

/// Runs all seven steps on `input` (any pure state on the circuit's qubits).
pub fn run_gadget(circuit: &Circuit, input: &Statevector, params: &GadgetParams) -> Result<GadgetOutcome> {
    let p_x = output_probability(circuit, input)?;
    let (ext, q) = gadget_circuit(circuit, params.rotation)?;
    let mut state = input.tensor(&Statevector::zero(2)?)?;
    run_in_place(&mut state, &ext);

    let even = Projector::basis_subspace(&[q.control, q.copy], [0b00, 0b11])?;
    let (p_post, conditioned) = project_named(&state, &even, "run_gadget step 6")?;

    let phi_plus = vec![
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(FRAC_1_SQRT_2, 0.0),
    ];
    let accept = Projector::rank_one(&[q.control, q.copy], phi_plus)?;
    let p_accept = statevec::probability(&conditioned, &accept)?;

    let (predicted_p_accept, predicted_p_post) = predict_gadget(p_x, params.rotation)?;
    Ok(GadgetOutcome {
        variant: params.variant,
        rotation: params.rotation,
        p_x,
        p_post,
        p_accept,
        predicted_p_accept,
        predicted_p_post,
        discrepancy: (p_accept - predicted_p_accept).abs(),
        l_bound_exponent: -p_post.log2(),
    })
}

/// Closed-form `(p_accept, p_post)` of the gadget for acceptance probability
/// `p_x` and rotation `t`.
///
/// After step 6 the unnormalised state is
/// `(a11|11> + a00|00>)|psi> + (b11|11> + b00|00>)|perp>` (times `1/(1+t^2)`)
/// with
/// `a11 = t(p + (1-p)t)`, `a00 = -((1-p) - tp)`,
/// `b11 = sqrt(p(1-p)) t(1-t)`, `b00 = sqrt(p(1-p)) (1+t)`.
pub fn predict_gadget(p_x: f64, rotation: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&rotation) {
        return Err(Error::input(format!("rotation {rotation} outside [0, 1)")));
    }
    if !p_x.is_finite() {
        return Err(Error::input("p_x is not finite"));
    }
    let p = p_x.clamp(0.0, 1.0);
    let t = rotation;
    let a11 = t * (p + (1.0 - p) * t);
    let a00 = -((1.0 - p) - t * p);
    let s = (p * (1.0 - p)).sqrt();
    let b11 = s * t * (1.0 - t);
    let b00 = s * (1.0 + t);
    let weight = a11 * a11 + a00 * a00 + b11 * b11 + b00 * b00;
    if weight < 1e-300 {
        return Err(Error::UndefinedPrediction(format!(
            "postselected weight vanishes at p_x = {p}, rotation = {t}"
        )));
    }
    let accept = ((a11 + a00).powi(2) + (b11 + b00).powi(2)) / (2.0 * weight);
    let post = weight / (1.0 + t * t).powi(2);
    Ok((accept, post))
}

/// Runs steps 1-3 with a fresh copy qubit and splits the result into
/// `sqrt(p)|1>|f1> + sqrt(1-p)|0>|f0>`.
pub fn decompose(circuit: &Circuit, input: &Statevector) -> Result<Decomposition> {
    let p_x = output_probability(circuit, input)?;
    let n = circuit.n_qubits();
    let mut ext = circuit.widened(1)?;
    ext.push(Gate::cx(), &[circuit.output_qubit(), n])?;
    ext.append_mapped(&inverse_circuit(circuit), |q| q)?;

    let mut state = input.tensor(&Statevector::zero(1)?)?;
    run_in_place(&mut state, &ext);
    // the copy qubit is the least significant bit
    let (g0, g1): (Vec<Complex64>, Vec<Complex64>) = state
        .amplitudes()
        .chunks_exact(2)
        .map(|pair| (pair[0], pair[1]))
        .unzip();
    let psi = input.amplitudes();

    if !(DEGENERATE_PX_TOLERANCE..=1.0 - DEGENERATE_PX_TOLERANCE).contains(&p_x) {
        let (live, dead) = if p_x > 0.5 { (&g1, &g0) } else { (&g0, &g1) };
        let scale = 1.0 / norm(live);
        let live_residual = distance(live.iter().map(|a| a * scale), psi.iter().copied());
        let dead_residual = norm(dead);
        let (residual_f1, residual_f0) = if p_x > 0.5 {
            (live_residual, dead_residual)
        } else {
            (dead_residual, live_residual)
        };
        return Ok(Decomposition {
            p_x,
            completeness_error: 1.0 - p_x,
            perp_state: None,
            perp_overlap: 0.0,
            residual_f1,
            residual_f0,
        });
    }

    let sp = p_x.sqrt();
    let sq = (1.0 - p_x).sqrt();
    let f1: Vec<Complex64> = g1.iter().map(|a| a / sp).collect();
    let f0: Vec<Complex64> = g0.iter().map(|a| a / sq).collect();

    let overlap = statevec_inner(psi, &f1);
    let raw_perp: Vec<Complex64> = f1.iter().zip(psi).map(|(f, s)| f - overlap * s).collect();
    let perp = Statevector::normalized(raw_perp)?;
    let perp_amps = perp.amplitudes();

    let residual_f1 = distance(
        f1.iter().copied(),
        psi.iter().zip(perp_amps).map(|(s, b)| s * sp + b * sq),
    );
    let residual_f0 = distance(
        f0.iter().copied(),
        psi.iter().zip(perp_amps).map(|(s, b)| s * sq - b * sp),
    );
    Ok(Decomposition {
        p_x,
        completeness_error: 1.0 - p_x,
        perp_overlap: statevec_inner(psi, perp_amps).norm(),
        perp_state: Some(perp),
        residual_f1,
        residual_f0,
    })
}

fn statevec_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn distance(a: impl Iterator<Item = Complex64>, b: impl Iterator<Item = Complex64>) -> f64 {
    a.zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// One [`GadgetOutcome`] per parameter set, in input order.
pub fn sweep(circuit: &Circuit, input: &Statevector, params_list: &[GadgetParams]) -> Result<Vec<GadgetOutcome>> {
    if params_list.is_empty() {
        return Err(Error::input("sweep needs at least one parameter set"));
    }
    params_list
        .par_iter()
        .map(|p| run_gadget(circuit, input, p))
        .collect()
}

/// `k` copies of `circuit` on disjoint qubits whose outputs are ANDed into a
/// fresh ancilla by a Toffoli chain.
///
/// The repeated layout keeps witness 1 of every copy first, then witness 2 of
/// every copy, then the copies' ancillas, then the `k - 1` chain ancillas.
pub fn amplify_by_repetition(circuit: &Circuit, k: usize) -> Result<Circuit> {
    if k == 0 {
        return Err(Error::input("repetition count must be positive"));
    }
    let l = circuit.layout();
    let total = k
        .checked_mul(l.n_qubits())
        .and_then(|q| q.checked_add(k - 1))
        .filter(|&q| q <= crate::MAX_QUBITS)
        .ok_or_else(|| {
            Error::Resource(format!(
                "{k} copies of a {}-qubit circuit exceed {} qubits",
                l.n_qubits(),
                crate::MAX_QUBITS
            ))
        })?;
    let layout = RegisterLayout::new(k * l.witness1, k * l.witness2, total - k * l.witness_qubits());
    let mut out = Circuit::new(layout)?;
    let place = |copy: usize, q: usize| -> usize {
        if q < l.witness1 {
            copy * l.witness1 + q
        } else if q < l.witness_qubits() {
            k * l.witness1 + copy * l.witness2 + (q - l.witness1)
        } else {
            k * l.witness_qubits() + copy * l.ancilla + (q - l.witness_qubits())
        }
    };
    for copy in 0..k {
        out.append_mapped(circuit, |q| place(copy, q))?;
    }
    let chain_base = k * l.n_qubits();
    let mut acc = place(0, circuit.output_qubit());
    for copy in 1..k {
        let target = chain_base + copy - 1;
        out.push(Gate::ccx(), &[acc, place(copy, circuit.output_qubit()), target])?;
        acc = target;
    }
    out.set_output(acc)?;
    Ok(out)
}

/// Input for [`amplify_by_repetition`] that feeds every copy the same
/// product witness `psi1 ⊗ psi2`. Pass `None` for an empty register.
pub fn repeated_product_input(
    base: RegisterLayout,
    psi1: Option<&Statevector>,
    psi2: Option<&Statevector>,
    k: usize,
) -> Result<Statevector> {
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for (w, psi) in [(base.witness1, psi1), (base.witness2, psi2)] {
        match (w, psi) {
            (0, None) => {}
            (w, Some(s)) if s.n_qubits() == w => {
                for _ in 0..k {
                    amps = statevec::kron(&amps, s.amplitudes());
                }
            }
            _ => return Err(Error::input("witness state does not match its register width")),
        }
    }
    let ancillas = k * base.ancilla + k - 1;
    let mut zero = vec![Complex64::new(0.0, 0.0); 1 << ancillas];
    zero[0] = Complex64::new(1.0, 0.0);
    Statevector::normalized(statevec::kron(&amps, &zero))
}

/// Appends a qubit prepared as `sqrt(c)|0> + sqrt(1-c)|1>` and a result
/// qubit set to `out AND (new qubit reads 0)`, scaling every acceptance
/// probability by `c`.
pub fn pad_completeness(circuit: &Circuit, c: f64) -> Result<Circuit> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::input(format!("completeness target {c} outside (0, 1)")));
    }
    let n = circuit.n_qubits();
    let (pad, result) = (n, n + 1);
    let mut out = circuit.widened(2)?;
    out.push(Gate::ry(2.0 * c.sqrt().acos()), &[pad])?;
    out.push(Gate::x(), &[pad])?;
    out.push(Gate::ccx(), &[circuit.output_qubit(), pad, result])?;
    out.push(Gate::x(), &[pad])?;
    out.set_output(result)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::acceptance_probability;

    fn acceptor() -> (Circuit, Statevector) {
        (
            Circuit::new(RegisterLayout::new(1, 0, 0)).unwrap(),
            Statevector::basis(1, 1).unwrap(),
        )
    }

    fn rotated(p: f64) -> (Circuit, Statevector) {
        let c = Circuit::new(RegisterLayout::new(1, 0, 0))
            .unwrap()
            .with(Gate::ry(2.0 * p.sqrt().asin()), &[0])
            .unwrap();
        (c, Statevector::zero(1).unwrap())
    }

    #[test]
    fn params_validation() {
        assert!(GadgetParams::protocol1(0.0).is_err());
        assert!(GadgetParams::protocol1(1.0).is_err());
        assert!(GadgetParams::protocol1_from_r(0).is_err());
        let p = GadgetParams::protocol1_from_r(1).unwrap();
        assert_eq!(p.rotation, 1.0 / 1024.0);
        assert_eq!(p.r_exponent, Some(1));
        assert_eq!(GadgetParams::default(), p);
    }

    #[test]
    fn predictor_completeness_one() {
        for t in [1e-6, 1e-3, 0.3, 0.9] {
            let (acc, post) = predict_gadget(1.0, t).unwrap();
            assert!((acc - 1.0).abs() < 1e-15);
            assert!((post - 2.0 * t * t / (1.0 + t * t).powi(2)).abs() < 1e-15);
        }
        assert!(matches!(predict_gadget(1.0, 0.0), Err(Error::UndefinedPrediction(_))));
    }

    #[test]
    fn predictor_small_rotation_limit() {
        let (acc, _) = predict_gadget(0.5, 1e-8).unwrap();
        assert!((acc - 0.5).abs() < 1e-7);
    }

    #[test]
    fn gadget_on_deterministic_acceptor() {
        let (c, psi) = acceptor();
        let eps = (-10f64).exp2();
        let out = run_gadget(&c, &psi, &GadgetParams::protocol1(eps).unwrap()).unwrap();
        assert!((out.p_accept - 1.0).abs() < 1e-9);
        let expect_post = 2.0 * eps * eps / (1.0 + eps * eps).powi(2);
        assert!((out.p_post - expect_post).abs() < 1e-15);
        assert!(out.accepts());
    }

    #[test]
    fn gadget_half_acceptance() {
        let (c, psi) = rotated(0.5);
        let out = run_gadget(&c, &psi, &GadgetParams::protocol1(1e-4).unwrap()).unwrap();
        assert!((out.p_x - 0.5).abs() < 1e-12);
        assert!((out.p_accept - 0.5).abs() < 2e-4);
        assert!(out.discrepancy < 1e-9);
        assert!(!out.accepts());
    }

    #[test]
    fn decompose_identity_acceptor() {
        let (c, psi) = acceptor();
        let d = decompose(&c, &psi).unwrap();
        assert_eq!(d.p_x, 1.0);
        assert!(d.perp_state.is_none());
        assert!(d.residual_f1 < 1e-12 && d.residual_f0 < 1e-12);
    }

    #[test]
    fn decompose_half() {
        let (c, psi) = rotated(0.5);
        let d = decompose(&c, &psi).unwrap();
        assert!((d.p_x - 0.5).abs() < 1e-12);
        assert!(d.perp_overlap < 1e-12);
        assert!(d.residual_f1 < 1e-12 && d.residual_f0 < 1e-12);
    }

    #[test]
    fn sweep_rejects_empty_list() {
        let (c, psi) = acceptor();
        assert!(sweep(&c, &psi, &[]).is_err());
    }

    #[test]
    fn sweep_converges_to_half() {
        let (c, psi) = rotated(0.75);
        let params: Vec<_> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e| GadgetParams::protocol1(e).unwrap())
            .collect();
        let out = sweep(&c, &psi, &params).unwrap();
        let gaps: Vec<f64> = out.iter().map(|o| (o.p_accept - 0.5).abs()).collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
        for (g, e) in gaps.iter().zip([1e-2, 1e-3, 1e-4]) {
            assert!(*g <= e);
        }
    }

    #[test]
    fn single_repetition_is_equivalent() {
        let (c, _) = rotated(0.3);
        let rep = amplify_by_repetition(&c, 1).unwrap();
        let psi = Statevector::zero(1).unwrap();
        let a = acceptance_probability(&c, &psi).unwrap();
        let b = acceptance_probability(&rep, &psi).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn triple_repetition_multiplies() {
        let (c, psi) = rotated(0.9);
        let rep = amplify_by_repetition(&c, 3).unwrap();
        let input = repeated_product_input(c.layout(), Some(&psi), None, 3).unwrap();
        let p = acceptance_probability(&rep, &input).unwrap();
        assert!((p - 0.729).abs() < 1e-9);

        let (acc, one) = acceptor();
        let rep = amplify_by_repetition(&acc, 3).unwrap();
        let input = repeated_product_input(acc.layout(), Some(&one), None, 3).unwrap();
        assert!((acceptance_probability(&rep, &input).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repetition_capacity() {
        let c = Circuit::new(RegisterLayout::new(4, 4, 0)).unwrap();
        assert!(matches!(amplify_by_repetition(&c, 4), Err(Error::Resource(_))));
        assert!(amplify_by_repetition(&c, 0).is_err());
    }

    #[test]
    fn padding_scales_acceptance() {
        let (acc, one) = acceptor();
        let padded = pad_completeness(&acc, 0.8).unwrap();
        let input = one.tensor(&Statevector::zero(2).unwrap()).unwrap();
        assert!((acceptance_probability(&padded, &input).unwrap() - 0.8).abs() < 1e-10);

        let zero = Statevector::zero(3).unwrap();
        assert!(acceptance_probability(&padded, &zero).unwrap().abs() < 1e-15);

        let (half, psi) = rotated(0.5);
        let padded = pad_completeness(&half, 0.5).unwrap();
        let input = psi.tensor(&Statevector::zero(2).unwrap()).unwrap();
        assert!((acceptance_probability(&padded, &input).unwrap() - 0.25).abs() < 1e-10);

        assert!(pad_completeness(&acc, 1.0).is_err());
        assert!(pad_completeness(&acc, 0.0).is_err());
    }
}
