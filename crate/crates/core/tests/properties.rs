//! Invariants of the simulator, gadget, witness optimiser and the legacy
//! protocols, checked on randomly drawn instances.

use num_complex::Complex64;
use postsel::gadget::{self, GadgetParams};
use postsel::legacy::{self, ControlRatio, MajorityDecision, TruthTable};
use postsel::random::{input_with_acceptance, random_circuit, random_product_input, random_state, substream};
use postsel::statevec::{parse_circuit, parse_state, state_to_text};
use postsel::witness::{self, FixedSide, RegisterSplit, SeesawSettings};
use postsel::{acceptance_operator, apply_circuit, inverse_circuit, Gate, GateKind, RegisterLayout, Statevector};
use proptest::prelude::*;

fn layout() -> impl Strategy<Value = RegisterLayout> {
    (1usize..4, 0usize..3, 0usize..3).prop_map(|(a, b, c)| RegisterLayout::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_are_unitary_and_inverses_cancel(kind in 0usize..GateKind::ALL.len(), a in -7.0f64..7.0, b in -7.0f64..7.0, c in -7.0f64..7.0) {
        let kind = GateKind::ALL[kind];
        let params = &[a, b, c][..kind.param_count()];
        let g = Gate::new(kind, params).unwrap();
        prop_assert!(g.unitarity_defect() < 1e-12);
        prop_assert!(g.inverse().unitarity_defect() < 1e-12);
    }

    #[test]
    fn circuits_preserve_norm_and_invert(seed in any::<u64>(), layout in layout()) {
        let mut rng = substream(seed, "props", 0);
        let circuit = random_circuit(layout, 30, &mut rng).unwrap();
        let psi = random_state(layout.n_qubits(), &mut rng).unwrap();
        let out = apply_circuit(&psi, &circuit).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        let back = apply_circuit(&out, &inverse_circuit(&circuit)).unwrap();
        prop_assert!(back.max_distance(&psi) < 1e-12);
    }

    #[test]
    fn circuit_text_round_trips(seed in any::<u64>(), layout in layout()) {
        let circuit = random_circuit(layout, 20, &mut substream(seed, "props", 1)).unwrap();
        prop_assert_eq!(parse_circuit(&circuit.to_text()).unwrap(), circuit);
    }

    #[test]
    fn state_text_round_trips(seed in any::<u64>(), n in 1usize..5) {
        let psi = random_state(n, &mut substream(seed, "props", 2)).unwrap();
        prop_assert_eq!(parse_state(&state_to_text(&psi)).unwrap(), psi);
    }

    #[test]
    fn acceptance_operator_is_a_contraction(seed in any::<u64>(), layout in layout()) {
        let circuit = random_circuit(layout, 30, &mut substream(seed, "props", 3)).unwrap();
        let a = acceptance_operator(&circuit).unwrap();
        prop_assert!(a.hermiticity_defect() < 1e-12);
        for e in a.eigenvalues() {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&e));
        }
    }

    #[test]
    fn predictor_stays_in_range(p in 0.0f64..=1.0, t in 1e-9f64..0.999) {
        let (acc, post) = gadget::predict_gadget(p, t).unwrap();
        prop_assert!((-1e-15..=1.0 + 1e-12).contains(&acc));
        prop_assert!(post > 0.0 && post <= 1.0 + 1e-12);
        prop_assert!(post >= t * t / 2.0);
    }

    #[test]
    fn gadget_matches_predictor(seed in any::<u64>(), layout in layout(), p in 0.0f64..=1.0, log_t in -20.0f64..-1.0) {
        let mut rng = substream(seed, "props", 4);
        let circuit = random_circuit(layout, 25, &mut rng).unwrap();
        let input = input_with_acceptance(&circuit, p, &mut rng).unwrap();
        let out = gadget::run_gadget(&circuit, &input, &GadgetParams::protocol1(log_t.exp2()).unwrap()).unwrap();
        prop_assert!(out.discrepancy < 1e-9, "discrepancy {}", out.discrepancy);
        prop_assert!((out.p_post - out.predicted_p_post).abs() < 1e-12);
    }

    #[test]
    fn decomposition_is_two_dimensional(seed in any::<u64>(), layout in layout()) {
        let mut rng = substream(seed, "props", 5);
        let circuit = random_circuit(layout, 30, &mut rng).unwrap();
        let psi = random_state(layout.n_qubits(), &mut rng).unwrap();
        let d = gadget::decompose(&circuit, &psi).unwrap();
        prop_assert!(d.residual_f1 < 1e-9 && d.residual_f0 < 1e-9);
        prop_assert!(d.perp_overlap < 1e-10);
    }

    #[test]
    fn reduced_operators_are_hermitian(seed in any::<u64>(), w1 in 1usize..3, w2 in 1usize..3) {
        let mut rng = substream(seed, "props", 6);
        let circuit = random_circuit(RegisterLayout::new(w1, w2, 1), 25, &mut rng).unwrap();
        let a = acceptance_operator(&circuit).unwrap();
        let fixed = random_state(w2, &mut rng).unwrap();
        let m = witness::reduced_operator(&a, &fixed, FixedSide::Second).unwrap();
        prop_assert!(m.hermiticity_defect() < 1e-12);
        let u = random_state(w1, &mut rng).unwrap();
        let lhs = m.expectation(u.amplitudes());
        let rhs = a.expectation(u.tensor(&fixed).unwrap().amplitudes());
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn seesaw_is_monotone_and_bounded(seed in any::<u64>(), w1 in 1usize..3, w2 in 1usize..3, m in 0usize..2) {
        let layout = RegisterLayout::new(w1, w2, m);
        let mut rng = substream(seed, "props", 7);
        let circuit = random_circuit(layout, 25, &mut rng).unwrap();
        let a = acceptance_operator(&circuit).unwrap();
        let split = RegisterSplit::from_layout(layout);
        let w = witness::seesaw_optimize(&a, split, None, &SeesawSettings { seed, ..SeesawSettings::default() }).unwrap();
        prop_assert!(w.iterates.windows(2).all(|p| p[1] >= p[0] - 1e-12));
        prop_assert!((w.value - a.expectation(&w.product_state())).abs() < 1e-10);
        let (ent, _) = witness::entangled_optimum(&a).unwrap();
        prop_assert!(w.value <= ent + 1e-12);
        let random = witness::random_product_search(&a, split, 300, seed).unwrap();
        prop_assert!(random.value <= w.value + 1e-6);
    }

    #[test]
    fn comparator_matches_closed_form(theta in 0.01f64..1.56, phi in 0.0f64..std::f64::consts::FRAC_PI_2) {
        let (a, b) = (theta.cos(), theta.sin());
        let (alpha, beta) = (phi.cos(), phi.sin());
        let target = Statevector::from_amplitudes(vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)]).unwrap();
        let (u, v) = (alpha * b, beta * (a - b) / 2f64.sqrt());
        prop_assume!(u * u + v * v > 1e-10);
        let (p, ctrl) = legacy::comparator_gadget(&target, ControlRatio::new(alpha, beta).unwrap()).unwrap();
        let norm = (u * u + v * v).sqrt();
        prop_assert!((p - (u * u + v * v)).abs() < 1e-12);
        prop_assert!((ctrl.amplitudes()[0] - Complex64::new(u / norm, 0.0)).norm() < 1e-12);
        prop_assert!((ctrl.amplitudes()[1] - Complex64::new(v / norm, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn majority_detection_matches_count(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = substream(seed, "props", 8);
        let bits: Vec<bool> = (0..1usize << n).map(|_| rand::Rng::random(&mut rng)).collect();
        let t = TruthTable::new(n, bits).unwrap();
        prop_assume!(2 * t.count_accepting() != 1 << n);
        let out = legacy::run_aaronson_pp(&t, legacy::default_exponents(n)).unwrap();
        let expect = if t.is_majority_accept() { MajorityDecision::MajorityAccept } else { MajorityDecision::MajorityReject };
        prop_assert_eq!(out.decision, expect);
    }

    #[test]
    fn eigenvector_witnesses_leave_pure_indicators(seed in any::<u64>(), w in 1usize..4, m in 1usize..3) {
        let circuit = random_circuit(RegisterLayout::new(w, 0, m), 25, &mut substream(seed, "props", 9)).unwrap();
        let (lambda, v) = legacy::mn_witness(&circuit).unwrap();
        let a = acceptance_operator(&circuit).unwrap();
        let av: Vec<Complex64> = (0..v.dim())
            .map(|i| (0..v.dim()).map(|j| a.entry(i, j) * v.amplitudes()[j]).sum())
            .collect();
        let residual: f64 = av.iter().zip(v.amplitudes()).map(|(x, y)| (x - y * lambda).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(residual < 1e-9);
        let out = legacy::run_mn_protocol(&circuit, &v).unwrap();
        prop_assert!((out.purity - 1.0).abs() < 1e-9);
        prop_assert!((out.amplitude_share - lambda).abs() < 1e-9);
        prop_assert!((out.p_post - (lambda * lambda + (1.0 - lambda).powi(2))).abs() < 1e-9);
    }

    #[test]
    fn repetition_multiplies_acceptance(seed in any::<u64>(), k in 1usize..4) {
        let layout = RegisterLayout::new(1, 1, 1);
        let mut rng = substream(seed, "props", 10);
        let circuit = random_circuit(layout, 15, &mut rng).unwrap();
        let psi1 = random_state(1, &mut rng).unwrap();
        let psi2 = random_state(1, &mut rng).unwrap();
        let single = psi1.tensor(&psi2).unwrap().tensor(&Statevector::zero(1).unwrap()).unwrap();
        let p = postsel::acceptance_probability(&circuit, &single).unwrap();
        let rep = gadget::amplify_by_repetition(&circuit, k).unwrap();
        let input = gadget::repeated_product_input(layout, Some(&psi1), Some(&psi2), k).unwrap();
        let pk = postsel::acceptance_probability(&rep, &input).unwrap();
        prop_assert!((pk - p.powi(k as i32)).abs() < 1e-10);
    }

    #[test]
    fn padding_scales_acceptance(seed in any::<u64>(), layout in layout(), c in 0.01f64..0.99) {
        let mut rng = substream(seed, "props", 11);
        let circuit = random_circuit(layout, 20, &mut rng).unwrap();
        let input = random_product_input(layout, &mut rng).unwrap();
        let p = postsel::acceptance_probability(&circuit, &input).unwrap();
        let padded = gadget::pad_completeness(&circuit, c).unwrap();
        let wide = input.tensor(&Statevector::zero(2).unwrap()).unwrap();
        prop_assert!((postsel::acceptance_probability(&padded, &wide).unwrap() - c * p).abs() < 1e-12);
    }
}
