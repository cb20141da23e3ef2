mod common;

use common::{brute_force_frontier, dead_from_mask, rich_circuit};
use dge_core::pass::{eliminate_dead_gates, PassConfig};
use dge_core::sim::{EquivalenceOptions, OpaqueBindings, Verifier};
use dge_core::{Circuit, GateId, QubitId};
use proptest::prelude::*;

fn with_dead(c: &Circuit, mask: u64) -> Circuit {
    c.with_dead(dead_from_mask(c.num_qubits(), mask)).unwrap()
}

fn configs() -> [PassConfig; 3] {
    [
        PassConfig::default(),
        PassConfig { swap_relabel: false, extended: false },
        PassConfig { swap_relabel: true, extended: true },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn optimized_circuits_keep_valid_marginals(n in 2usize..=6, len in 0usize..40, seed: u64, mask: u64, cfg in 0usize..3) {
        let original = with_dead(&rich_circuit(n, len, seed), mask);
        let (optimized, _) = eliminate_dead_gates(original.clone(), configs()[cfg]);
        let bindings = OpaqueBindings::haar_for_circuits([&original], seed);
        let verifier = Verifier::new(EquivalenceOptions { seed, ..EquivalenceOptions::default() }, bindings);
        let verdict = verifier.check_optimized(&original, &optimized).unwrap();
        prop_assert!(verdict.equivalent, "discrepancy {}", verdict.max_discrepancy);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn second_run_removes_nothing(n in 1usize..=8, len in 0usize..80, seed: u64, mask: u64, cfg in 0usize..3) {
        let c = with_dead(&rich_circuit(n, len, seed), mask);
        let (once, _) = eliminate_dead_gates(c, configs()[cfg]);
        let (twice, report) = eliminate_dead_gates(once.clone(), configs()[cfg]);
        prop_assert!(report.removed.is_empty());
        prop_assert_eq!(report.iterations, 1);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn report_bookkeeping(n in 1usize..=8, len in 0usize..80, seed: u64, mask: u64, cfg in 0usize..3) {
        let c = with_dead(&rich_circuit(n, len, seed), mask);
        let (out, report) = eliminate_dead_gates(c.clone(), configs()[cfg]);
        prop_assert_eq!(report.initial_gate_count - report.final_gate_count, report.removed.len());
        prop_assert_eq!(report.final_dead.len(), c.dead().len());
        prop_assert_eq!(&report.final_dead, out.dead());
        prop_assert!(report.gate_checks <= len * (len + 1));
        prop_assert!(report.iterations >= 1);
        // survivors keep their ids and order
        let ids: Vec<GateId> = out.gate_ids();
        prop_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        for g in out.gates() {
            prop_assert_eq!(c.gate(g.id), Some(g));
        }
        if !configs()[cfg].extended {
            prop_assert!(report.removed.iter().all(|r| r.rule != dge_core::RemovalRule::AllDeadUnitary));
        }
    }

    #[test]
    fn more_dead_qubits_never_remove_less(n in 2usize..=8, len in 0usize..80, seed: u64, small: u64, extra: u64, cfg in 0usize..3) {
        let c = rich_circuit(n, len, seed);
        let (_, r1) = eliminate_dead_gates(with_dead(&c, small), configs()[cfg]);
        let (_, r2) = eliminate_dead_gates(with_dead(&c, small | extra), configs()[cfg]);
        prop_assert!(r1.removed.len() <= r2.removed.len());
        if !configs()[cfg].swap_relabel {
            let s2: Vec<GateId> = r2.removed_ids();
            prop_assert!(r1.removed_ids().iter().all(|g| s2.contains(g)));
        }
    }

    #[test]
    fn identical_input_identical_report(n in 1usize..=8, len in 0usize..60, seed: u64, mask: u64) {
        let c = with_dead(&rich_circuit(n, len, seed), mask);
        let (_, a) = eliminate_dead_gates(c.clone(), PassConfig::default());
        let (_, b) = eliminate_dead_gates(c, PassConfig::default());
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn incremental_frontier_matches_batch(n in 1usize..=8, len in 0usize..60, seed: u64, picks in proptest::collection::vec(any::<prop::sample::Index>(), 0..60)) {
        let mut c = rich_circuit(n, len, seed);
        prop_assert_eq!(c.frontier().iter().map(|g| g.0).collect::<Vec<_>>(), brute_force_frontier(&c));
        for pick in picks {
            if c.is_empty() {
                break;
            }
            let ids = c.gate_ids();
            c.remove_gate(ids[pick.index(ids.len())]).unwrap();
            let batch = brute_force_frontier(&c);
            prop_assert_eq!(c.frontier().iter().map(|g| g.0).collect::<Vec<_>>(), batch.clone());
            for q in 0..n {
                let last = c.gates().filter(|g| g.kind.qubits().contains(&QubitId(q))).map(|g| g.id).last();
                prop_assert_eq!(c.last_gate_on_wire(QubitId(q)).unwrap(), last);
            }
            for id in c.gate_ids() {
                prop_assert_eq!(c.in_frontier(id), batch.contains(&id.0));
            }
        }
    }
}

#[test]
fn no_dead_qubits_single_iteration() {
    for seed in 0..20 {
        let c = rich_circuit(5, 50, seed);
        let (out, report) = eliminate_dead_gates(c.clone(), PassConfig::default());
        assert!(report.removed.is_empty());
        assert_eq!(report.iterations, 1);
        assert_eq!(out, c);
    }
}
