mod common;

use std::collections::BTreeSet;

use approx::assert_abs_diff_eq;
use dge_core::fixtures;
use dge_core::pass::{eliminate_dead_gates, PassConfig};
use dge_core::sim::{random_state, EquivalenceOptions, OpaqueBindings, Simulator, Statevector, Verifier};
use dge_core::{Circuit, GateKind, QubitId};
use num_complex::Complex64;
use proptest::prelude::*;

fn q(i: usize) -> QubitId {
    QubitId(i)
}

fn verifier_for(circuits: &[&Circuit], seed: u64) -> Verifier {
    let bindings = OpaqueBindings::haar_for_circuits(circuits.iter().copied(), seed);
    Verifier::new(EquivalenceOptions { seed, ..Default::default() }, bindings)
}

#[test]
fn example_two_marginals() {
    let amps = [0.1, 0.3, 0.5, 0.8].map(|x: f64| x);
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    let s = Statevector::from_amplitudes(amps.iter().map(|a| Complex64::new(a / norm, 0.0)).collect()).unwrap();
    let p = |i: usize| (amps[i] / norm).powi(2);
    let both = s.marginal(&[q(0), q(1)]).unwrap();
    assert_abs_diff_eq!(both.probability("01").unwrap(), p(1), epsilon = 1e-15);
    assert_abs_diff_eq!(both.probability("10").unwrap(), p(2), epsilon = 1e-15);
    assert_abs_diff_eq!(both.probability("00").unwrap(), p(0), epsilon = 1e-15);
    let first = s.marginal(&[q(0)]).unwrap();
    assert_abs_diff_eq!(first.probability("1").unwrap(), p(2) + p(3), epsilon = 1e-15);
    let none = s.marginal(&[]).unwrap();
    assert_eq!(none.probs().len(), 1);
    assert_abs_diff_eq!(none.probs()[0], 1.0, epsilon = 1e-12);
}

#[test]
fn fig2_keeps_norm() {
    let c = fixtures::fig2();
    let sim = Simulator::new(OpaqueBindings::haar_for_circuits([&c], 3));
    let out = sim.simulate(&c, &Statevector::zero(3)).unwrap();
    assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-12);
}

#[test]
fn hh_equals_zh_on_q1() {
    let a = Circuit::new(2, [GateKind::h(0), GateKind::h(1)], [q(0)]).unwrap();
    let b = Circuit::new(2, [GateKind::z(0), GateKind::h(1)], [q(0)]).unwrap();
    let v = verifier_for(&[&a], 0).check_equiv(&a, &b, a.dead()).unwrap();
    assert!(v.equivalent);
}

#[test]
fn fixtures_verify_after_optimization() {
    for (name, c) in [
        ("fig2", fixtures::fig2()),
        ("vqe", fixtures::vqe_a1()),
        ("qpe", fixtures::qpe_m4()),
        ("frontier", fixtures::frontier_example()),
    ] {
        let (opt, _) = eliminate_dead_gates(c.clone(), PassConfig::default());
        for seed in 0..3 {
            let v = verifier_for(&[&c], seed).check_optimized(&c, &opt).unwrap();
            assert!(v.equivalent, "{name} seed {seed}: {}", v.max_discrepancy);
        }
    }
    let v = verifier_for(&[&fixtures::fig2()], 1)
        .check_equiv(&fixtures::fig2(), &fixtures::fig3(), &BTreeSet::from([q(0)]))
        .unwrap();
    assert!(v.equivalent);
    let v = verifier_for(&[&fixtures::vqe_a1()], 1)
        .check_equiv(&fixtures::vqe_a1(), &fixtures::vqe_a2(), &BTreeSet::from([q(0), q(1)]))
        .unwrap();
    assert!(v.equivalent);
}

#[test]
fn invalid_simplifications_are_caught() {
    for (name, (original, invalid)) in [
        ("general", fixtures::counterexample_general()),
        ("cx", fixtures::counterexample_cx()),
        ("cz", fixtures::counterexample_cz()),
    ] {
        let v = verifier_for(&[&original], 0).check_equiv(&original, &invalid, original.dead()).unwrap();
        assert!(!v.equivalent, "{name}");
        assert!(v.witness.is_some());
    }
}

#[test]
fn cx_counterexample_basis_witness() {
    // |10⟩ through CX(q0→q1): q1 reads 1; the invalid circuit leaves it 0.
    let (original, invalid) = fixtures::counterexample_cx();
    let sim = Simulator::default();
    let input = Statevector::basis(2, 0b10);
    let p1 = sim.simulate(&original, &input).unwrap().marginal(&[q(1)]).unwrap();
    let p2 = sim.simulate(&invalid, &input).unwrap().marginal(&[q(1)]).unwrap();
    assert_abs_diff_eq!(p1.probability("1").unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(p2.probability("1").unwrap(), 0.0, epsilon = 1e-12);
}

#[test]
fn swap_three_qubits_extended() {
    // SWAP(q0,q1) then nothing, vs empty: with d2 = {q1} and pairing q0↦q1
    // the two agree; keeping d2 = d1 = {q0} they do not.
    let h = GateKind::single(dge_core::BaseGate::U3(0.7, 0.1, 0.2), 1);
    let a = Circuit::new(3, [h.clone(), GateKind::swap(0, 1)], [q(0)]).unwrap();
    let b = Circuit::new(3, [h], [q(1)]).unwrap();
    let v = verifier_for(&[&a], 2);
    let ok = v
        .check_equiv_extended(&a, &b, a.dead(), b.dead(), &[(q(0), q(1))])
        .unwrap();
    assert!(ok.equivalent);
    let bad = v.check_equiv(&a, &b, a.dead()).unwrap();
    assert!(!bad.equivalent);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marginals_coarse_grain(n in 1usize..=7, seed: u64, split in 0usize..8) {
        let s = random_state(n, seed).unwrap();
        let all: Vec<QubitId> = (0..n).map(QubitId).collect();
        let k = split % (n + 1);
        let a = &all[..k];
        let fine = s.marginal(&all).unwrap();
        let coarse = s.marginal(a).unwrap();
        prop_assert!((fine.total() - 1.0).abs() < 1e-9);
        prop_assert!((coarse.total() - 1.0).abs() < 1e-9);
        for (idx, p) in coarse.probs().iter().enumerate() {
            let prefix = coarse.bitstring(idx);
            let sum: f64 = (0..fine.probs().len())
                .filter(|&j| fine.bitstring(j).starts_with(&prefix))
                .map(|j| fine.probs()[j])
                .sum();
            prop_assert!((sum - p).abs() < 1e-12);
        }
    }

    #[test]
    fn simulation_preserves_norm(n in 1usize..=6, len in 0usize..40, seed: u64) {
        let c = common::rich_circuit(n, len, seed);
        let sim = Simulator::new(OpaqueBindings::haar_for_circuits([&c], seed));
        let out = sim.simulate(&c, &random_state(n, seed).unwrap()).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
