//! Independent check of the closed-form gadget predictor.
//!
//! After the uncomputation the system lives in span{|psi>, |perp>}; together
//! with the control and copy qubits that is an 8-dimensional real space in
//! which the remaining steps are plain 2x2 matrices.

use postsel::gadget::{predict_gadget, run_gadget, GadgetParams};
use postsel::random::{input_with_acceptance, random_circuit, substream};
use postsel::RegisterLayout;
use proptest::prelude::*;

/// Index layout: system (psi = 0, perp = 1), control, copy; copy least significant.
fn oracle(p: f64, t: f64) -> (f64, f64) {
    let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
    let mut v = [0.0f64; 8];
    // copy = 1 branch: sqrt(p) |f1>, f1 = sqrt(p) psi + sqrt(1-p) perp
    v[0b001] = sp * sp;
    v[0b101] = sp * sq;
    // copy = 0 branch: sqrt(1-p) |f0>, f0 = sqrt(1-p) psi - sqrt(p) perp
    v[0b000] = sq * sq;
    v[0b100] = -sq * sp;

    let n = (1.0 + t * t).sqrt();
    let control = [-1.0 / n, t / n];
    let r = [[1.0 / n, -t / n], [t / n, 1.0 / n]];

    let mut w = [0.0f64; 8];
    for sys in 0..2 {
        for k_in in 0..2 {
            let amp = v[sys << 2 | k_in];
            for c in 0..2 {
                for k in 0..2 {
                    w[sys << 2 | c << 1 | k] += amp * control[c] * r[k][k_in];
                }
            }
        }
    }
    let kept: f64 = (0..2).map(|s| w[s << 2].powi(2) + w[s << 2 | 0b11].powi(2)).sum();
    let accepted: f64 = (0..2).map(|s| (w[s << 2] + w[s << 2 | 0b11]).powi(2) / 2.0).sum();
    (accepted / kept, kept)
}

proptest! {
    #[test]
    fn closed_form_matches_subspace_oracle(p in 0.0f64..=1.0, t in 1e-6f64..0.99) {
        let (acc, post) = predict_gadget(p, t).unwrap();
        let (o_acc, o_post) = oracle(p, t);
        prop_assert!((acc - o_acc).abs() < 1e-12);
        prop_assert!((post - o_post).abs() < 1e-12);
    }
}

#[test]
fn imperfect_completeness_yes_side_value() {
    let (eps, delta) = (1e-6, 1e-2);
    let (acc, _) = predict_gadget(1.0 - eps, delta).unwrap();
    let (o_acc, _) = oracle(1.0 - eps, delta);
    assert!((acc - o_acc).abs() < 1e-12);
    // first-order deficit is eps'/(4 delta^2) * (1 + O(delta)), about 0.0025
    assert!((acc - 0.997_511_9).abs() < 1e-7, "{acc}");
    assert!(acc >= 1.0 - eps / (2.0 * delta * delta));

    let mut rng = substream(1, "yes-side", 0);
    let circuit = random_circuit(RegisterLayout::new(2, 1, 1), 30, &mut rng).unwrap();
    let input = input_with_acceptance(&circuit, 1.0 - eps, &mut rng).unwrap();
    let out = run_gadget(&circuit, &input, &GadgetParams::protocol3(delta).unwrap()).unwrap();
    assert!((out.p_accept - acc).abs() < 1e-9);
}

#[test]
fn completeness_one_postselection_weight() {
    for t in [2f64.powi(-10), 0.01, 0.5] {
        let (acc, post) = oracle(1.0, t);
        assert!((acc - 1.0).abs() < 1e-15);
        assert!((post - 2.0 * t * t / (1.0 + t * t).powi(2)).abs() < 1e-15);
    }
}
