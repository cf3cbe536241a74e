//! The acceptance battery: each criterion is a list of named numeric checks
//! with pinned tolerances, shared by the `suite` command and the acceptance
//! test target.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::gadget::{self, GadgetParams};
use crate::legacy::{self, MajorityDecision, TruthTable};
use crate::random::{input_with_acceptance, random_circuit, random_product_input, substream};
use crate::statevec::{acceptance_operator, acceptance_probability, Circuit, Gate, RegisterLayout, Statevector};
use crate::witness::{self, RegisterSplit, SeesawSettings};

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Wall-clock budget for the whole battery.
pub const SUITE_BUDGET_SECONDS: f64 = 300.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The measured quantity (worst case over the family where relevant).
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl CriterionOutcome {
    pub fn summary_line(&self) -> String {
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!("[{status}] {:>2} {} ({:.2}s)", self.id, self.title, self.seconds);
        if !failed.is_empty() {
            line.push_str(&format!(" failing: {}", failed.join(", ")));
        }
        line
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub total_seconds: f64,
    pub criteria: Vec<CriterionOutcome>,
}

struct Checks(Vec<Check>);

impl Checks {
    fn new() -> Self {
        Self(Vec::new())
    }

    fn at_most(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.0.push(Check {
            name: name.into(),
            passed: value <= bound,
            value,
            bound,
        });
    }

    fn below(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.0.push(Check {
            name: name.into(),
            passed: value < bound,
            value,
            bound,
        });
    }

    fn at_least(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.0.push(Check {
            name: name.into(),
            passed: value >= bound,
            value,
            bound,
        });
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool) {
        self.0.push(Check {
            name: name.into(),
            passed: ok,
            value: if ok { 1.0 } else { 0.0 },
            bound: 1.0,
        });
    }
}

fn timed(id: u8, title: &'static str, body: impl FnOnce(&mut Checks) -> Result<()>) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut checks = Checks::new();
    body(&mut checks)?;
    Ok(CriterionOutcome {
        id,
        title,
        passed: checks.0.iter().all(|c| c.passed),
        seconds: start.elapsed().as_secs_f64(),
        checks: checks.0,
    })
}

fn completeness_one_input<R: Rng>(n: usize, rng: &mut R) -> Result<(Circuit, Statevector)> {
    let w1 = n.div_ceil(3);
    let w2 = n / 3;
    let layout = RegisterLayout::new(w1, w2, n - w1 - w2);
    let circuit = random_circuit(layout, 8 * n, rng)?;
    let input = input_with_acceptance(&circuit, 1.0, rng)?;
    Ok((circuit, input))
}

/// Deterministic acceptors keep acceptance probability 1 through the gadget.
pub fn completeness_preservation(seed: u64) -> Result<CriterionOutcome> {
    timed(1, "completeness preservation", |checks| {
        let params = GadgetParams::protocol1_from_r(1)?;
        let mut worst = 0.0f64;
        let mut slowest = 0.0f64;
        for i in 0..20 {
            let n = 3 + i % 10;
            let mut rng = substream(seed, "completeness_preservation", i as u64);
            let (circuit, input) = completeness_one_input(n, &mut rng)?;
            let start = Instant::now();
            let out = gadget::run_gadget(&circuit, &input, &params)?;
            slowest = slowest.max(start.elapsed().as_secs_f64());
            worst = worst.max((out.p_accept - 1.0).abs());
        }
        checks.at_most("max |p_accept - 1|", worst, 1e-9);
        checks.below("slowest run seconds", slowest, 1.0);
        Ok(())
    })
}

const GRID_PX: [f64; 4] = [0.25, 0.5, 0.875, 1.0 - 1.0 / 256.0];

fn grid_rotations() -> impl Iterator<Item = f64> {
    (5..=20).map(|k| (-(k as f64)).exp2())
}

fn grid_instance(seed: u64, index: u64, p: f64) -> Result<(Circuit, Statevector)> {
    let mut rng = substream(seed, "soundness_grid", index);
    let circuit = random_circuit(RegisterLayout::new(2, 2, 1), 40, &mut rng)?;
    let input = input_with_acceptance(&circuit, p, &mut rng)?;
    Ok((circuit, input))
}

/// Acceptance after the gadget approaches 1/2 as the rotation shrinks, for
/// any `p_x < 1`, and agrees with the closed form.
pub fn soundness_collapse(seed: u64) -> Result<CriterionOutcome> {
    timed(2, "soundness collapse", |checks| {
        let start = Instant::now();
        let mut worst_match = 0.0f64;
        let mut worst_ratio = 0.0f64;
        for (i, &p) in GRID_PX.iter().enumerate() {
            let (circuit, input) = grid_instance(seed, i as u64, p)?;
            let params: Vec<GadgetParams> = grid_rotations().map(GadgetParams::protocol1).collect::<Result<_>>()?;
            for out in gadget::sweep(&circuit, &input, &params)? {
                worst_match = worst_match.max(out.discrepancy);
                let bound = 10.0 * out.rotation / (1.0 - p);
                worst_ratio = worst_ratio.max((out.p_accept - 0.5).abs() / bound);
            }
        }
        checks.at_most("max |simulated - predicted|", worst_match, 1e-9);
        checks.at_most("max |p_accept - 1/2| / (10 t/(1-p_x))", worst_ratio, 1.0);
        checks.below("runtime seconds", start.elapsed().as_secs_f64(), 30.0);
        Ok(())
    })
}

/// The postselection probability never drops below `t^2 / 2`.
pub fn postselection_floor(seed: u64) -> Result<CriterionOutcome> {
    timed(3, "postselection floor", |checks| {
        let mut worst = f64::INFINITY;
        for (i, &p) in GRID_PX.iter().enumerate() {
            let (circuit, input) = grid_instance(seed, i as u64, p)?;
            let params: Vec<GadgetParams> = grid_rotations().map(GadgetParams::protocol1).collect::<Result<_>>()?;
            for out in gadget::sweep(&circuit, &input, &params)? {
                worst = worst.min(out.p_post / (out.rotation * out.rotation / 2.0));
            }
        }
        for i in 0..100u64 {
            let mut rng = substream(seed, "postselection_floor", i);
            let layout = RegisterLayout::new(rng.random_range(1..=3), rng.random_range(0..=2), rng.random_range(0..=2));
            let circuit = random_circuit(layout, 30, &mut rng)?;
            let input = random_product_input(layout, &mut rng)?;
            let t = (-rng.random_range(5.0..20.0f64)).exp2();
            let out = gadget::run_gadget(&circuit, &input, &GadgetParams::protocol1(t)?)?;
            worst = worst.min(out.p_post / (t * t / 2.0));
        }
        checks.at_least("min p_post / (t^2/2)", worst, 1.0);
        Ok(())
    })
}

/// The uncomputed state splits into the input and one orthogonal direction.
pub fn decomposition_residuals(seed: u64) -> Result<CriterionOutcome> {
    timed(4, "decomposition residuals", |checks| {
        let mut f1 = 0.0f64;
        let mut f0 = 0.0f64;
        let mut overlap = 0.0f64;
        for i in 0..100u64 {
            let mut rng = substream(seed, "decomposition_residuals", i);
            let layout = RegisterLayout::new(rng.random_range(1..=3), rng.random_range(0..=3), rng.random_range(0..=3));
            let circuit = random_circuit(layout, 40, &mut rng)?;
            let input = crate::random::random_state(layout.n_qubits(), &mut rng)?;
            let d = gadget::decompose(&circuit, &input)?;
            f1 = f1.max(d.residual_f1);
            f0 = f0.max(d.residual_f0);
            overlap = overlap.max(d.perp_overlap);
        }
        checks.below("max residual_f1", f1, 1e-9);
        checks.below("max residual_f0", f0, 1e-9);
        checks.at_most("max |<psi|perp>|", overlap, 1e-10);
        Ok(())
    })
}

/// Completeness `1 - eps'` with rotation `delta`: yes instances stay near 1,
/// instances with `p_x = 1 - delta'` fall towards 1/2.
pub fn protocol3_regime(seed: u64) -> Result<CriterionOutcome> {
    timed(5, "imperfect-completeness regime", |checks| {
        let eps = 1e-6;
        let delta = 1e-2;
        let params = GadgetParams::protocol3(delta)?;
        let (circuit, yes_input) = grid_instance(seed, 100, 1.0 - eps)?;
        let yes = gadget::run_gadget(&circuit, &yes_input, &params)?;
        let mut worst_match = yes.discrepancy;
        checks.at_least("yes-side p_accept", yes.p_accept, 0.999);
        checks.at_least("yes-side p_accept vs 1 - eps'/(2 delta^2)", yes.p_accept, 1.0 - eps / (2.0 * delta * delta));
        let mut worst_no = 0.0f64;
        for (i, dp) in [0.1, 0.2, 0.3].into_iter().enumerate() {
            let (circuit, input) = grid_instance(seed, 101 + i as u64, 1.0 - dp)?;
            let no = gadget::run_gadget(&circuit, &input, &params)?;
            worst_no = worst_no.max(no.p_accept);
            worst_match = worst_match.max(no.discrepancy);
        }
        checks.at_most("no-side max p_accept", worst_no, 0.7);
        checks.at_most("max |simulated - predicted|", worst_match, 1e-9);
        Ok(())
    })
}

/// Random search, seesaw and the entangled optimum are ordered, seesaw is
/// exact on tensor products, and a Bell projector separates product from
/// entangled witnesses.
pub fn witness_sandwich(seed: u64) -> Result<CriterionOutcome> {
    timed(6, "witness optimization sandwich", |checks| {
        let mut lower_gap = f64::NEG_INFINITY;
        let mut upper_gap = f64::NEG_INFINITY;
        let mut monotone = true;
        for i in 0..100u64 {
            let mut rng = substream(seed, "witness_sandwich", i);
            let layout = RegisterLayout::new(rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(0..=2));
            let circuit = random_circuit(layout, 30, &mut rng)?;
            let a = acceptance_operator(&circuit)?;
            let split = RegisterSplit::from_layout(layout);
            let settings = SeesawSettings {
                seed: rng.random(),
                ..SeesawSettings::default()
            };
            let seesaw = witness::seesaw_optimize(&a, split, None, &settings)?;
            let random = witness::random_product_search(&a, split, 2000, rng.random())?;
            let (ent, _) = witness::entangled_optimum(&a)?;
            lower_gap = lower_gap.max(random.value - seesaw.value);
            upper_gap = upper_gap.max(seesaw.value - ent);
            monotone &= seesaw.iterates.windows(2).all(|w| w[1] >= w[0] - 1e-12);
        }
        checks.at_most("max random - seesaw", lower_gap, 1e-6);
        checks.at_most("max seesaw - entangled", upper_gap, 1e-6);
        checks.holds("seesaw traces nondecreasing", monotone);

        let mut separable = 0.0f64;
        for i in 0..10u64 {
            let mut rng = substream(seed, "witness_separable", i);
            let (w1, w2) = (rng.random_range(1..=3usize), rng.random_range(1..=3usize));
            let e1: Vec<f64> = (0..1 << w1).map(|_| rng.random()).collect();
            let e2: Vec<f64> = (0..1 << w2).map(|_| rng.random()).collect();
            let a1 = witness::operator_with_spectrum(&e1, rng.random())?;
            let a2 = witness::operator_with_spectrum(&e2, rng.random())?;
            let expect = e1.iter().cloned().fold(0.0, f64::max) * e2.iter().cloned().fold(0.0, f64::max);
            let w = witness::seesaw_optimize(&a1.kron(&a2), RegisterSplit::new(w1, w2), None, &SeesawSettings::default())?;
            separable = separable.max((w.value - expect).abs());
        }
        checks.at_most("separable max |seesaw - product of tops|", separable, 1e-8);

        let bell = acceptance_operator(&witness::bell_projector_circuit())?;
        let (ent, _) = witness::entangled_optimum(&bell)?;
        let prod = witness::seesaw_optimize(&bell, RegisterSplit::new(1, 1), None, &SeesawSettings::default())?;
        checks.at_most("Bell product optimum |value - 1/2|", (prod.value - 0.5).abs(), 1e-6);
        checks.at_most("Bell entangled optimum |value - 1|", (ent - 1.0).abs(), 1e-6);
        Ok(())
    })
}

/// Majority detection agrees with direct counting.
pub fn majority_oracle(seed: u64) -> Result<CriterionOutcome> {
    timed(7, "majority detection oracle", |checks| {
        let start = Instant::now();
        let mut mismatches = 0usize;
        let mut total = 0usize;
        let mut judge = |t: &TruthTable| -> Result<()> {
            let out = legacy::run_aaronson_pp(t, legacy::default_exponents(t.n_bits()))?;
            let expect = if t.is_majority_accept() {
                MajorityDecision::MajorityAccept
            } else {
                MajorityDecision::MajorityReject
            };
            total += 1;
            if out.decision != expect {
                mismatches += 1;
            }
            Ok(())
        };
        for n in 1..=3usize {
            for bits in 0..1u64 << (1 << n) {
                let t = TruthTable::from_bits(n, bits)?;
                if 2 * t.count_accepting() != 1 << n {
                    judge(&t)?;
                }
            }
        }
        let mut rng = substream(seed, "majority_oracle", 0);
        let mut drawn = 0;
        while drawn < 200 {
            let n = rng.random_range(4..=8usize);
            let t = TruthTable::new(n, (0..1 << n).map(|_| rng.random()).collect())?;
            if 2 * t.count_accepting() != 1 << n {
                judge(&t)?;
                drawn += 1;
            }
        }
        checks.at_most(format!("mismatches over {total} tables"), mismatches as f64, 0.0);
        checks.below("runtime seconds", start.elapsed().as_secs_f64(), 60.0);
        Ok(())
    })
}

/// Eigenvector witnesses leave a pure indicator qubit; a superposition of
/// eigenvectors does not.
pub fn eigenvector_indicator(seed: u64) -> Result<CriterionOutcome> {
    timed(8, "eigenvector witness indicator", |checks| {
        let mut purity = 0.0f64;
        let mut weight = 0.0f64;
        for i in 0..20u64 {
            let mut rng = substream(seed, "eigenvector_indicator", i);
            let layout = RegisterLayout::new(rng.random_range(1..=3), rng.random_range(0..=1), rng.random_range(1..=3));
            let circuit = random_circuit(layout, 30, &mut rng)?;
            let (lambda, w) = legacy::mn_witness(&circuit)?;
            let out = legacy::run_mn_protocol(&circuit, &w)?;
            purity = purity.max((out.purity - 1.0).abs());
            weight = weight.max((out.amplitude_share - lambda).abs());
        }
        checks.at_most("max |purity - 1|", purity, 1e-9);
        checks.at_most("max |amplitude share - eigenvalue|", weight, 1e-9);

        let identity = Circuit::new(RegisterLayout::new(1, 0, 0))?;
        let plus = Statevector::normalized(vec![num_complex::Complex64::new(1.0, 0.0); 2])?;
        let mixed = legacy::run_mn_protocol(&identity, &plus)?;
        checks.below("non-eigenvector purity", mixed.purity, 0.99);
        Ok(())
    })
}

/// Parallel repetition multiplies acceptance; padding rescales completeness.
pub fn repetition_and_padding(_seed: u64) -> Result<CriterionOutcome> {
    timed(9, "repetition and padding", |checks| {
        let base = Circuit::new(RegisterLayout::new(1, 0, 0))?.with(Gate::ry(2.0 * 0.9f64.sqrt().asin()), &[0])?;
        let zero = Statevector::zero(1)?;
        let rep = gadget::amplify_by_repetition(&base, 3)?;
        let input = gadget::repeated_product_input(base.layout(), Some(&zero), None, 3)?;
        let p = acceptance_probability(&rep, &input)?;
        checks.at_most("|3-fold repetition - 0.729|", (p - 0.729).abs(), 1e-9);

        let acceptor = Circuit::new(RegisterLayout::new(1, 0, 0))?;
        let padded = gadget::pad_completeness(&acceptor, 0.8)?;
        let input = Statevector::basis(3, 0b100)?;
        let p = acceptance_probability(&padded, &input)?;
        checks.at_most("|padded acceptor - 0.8|", (p - 0.8).abs(), 1e-10);
        Ok(())
    })
}

/// A 16-qubit verifier through the gadget in under five seconds.
pub fn performance(seed: u64) -> Result<CriterionOutcome> {
    timed(10, "performance", |checks| {
        let mut rng = substream(seed, "performance", 0);
        let layout = RegisterLayout::new(6, 6, 4);
        let circuit = random_circuit(layout, 200, &mut rng)?;
        let input = random_product_input(layout, &mut rng)?;
        let start = Instant::now();
        gadget::run_gadget(&circuit, &input, &GadgetParams::default())?;
        checks.below("16-qubit gadget seconds", start.elapsed().as_secs_f64(), 5.0);
        Ok(())
    })
}

pub type CriterionFn = fn(u64) -> Result<CriterionOutcome>;

pub const CRITERIA: [CriterionFn; 10] = [
    completeness_preservation,
    soundness_collapse,
    postselection_floor,
    decomposition_residuals,
    protocol3_regime,
    witness_sandwich,
    majority_oracle,
    eigenvector_indicator,
    repetition_and_padding,
    performance,
];

/// Runs every criterion in order. The performance criterion also carries
/// the check on the battery's total wall-clock time.
pub fn run_suite(seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut criteria = CRITERIA.iter().map(|f| f(seed)).collect::<Result<Vec<_>>>()?;
    let total_seconds = start.elapsed().as_secs_f64();
    if let Some(perf) = criteria.last_mut() {
        let ok = total_seconds < SUITE_BUDGET_SECONDS;
        perf.checks.push(Check {
            name: "suite seconds".into(),
            passed: ok,
            value: total_seconds,
            bound: SUITE_BUDGET_SECONDS,
        });
        perf.passed &= ok;
    }
    let passed = criteria.iter().filter(|c| c.passed).count();
    Ok(SuiteReport {
        seed,
        passed,
        failed: criteria.len() - passed,
        total_seconds,
        criteria,
    })
}
