mod common;

use dge_core::pass::{eliminate_dead_gates, PassConfig};
use dge_core::qasm::{parse, SourceCircuit};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn serialize_then_parse_is_identity(n in 1usize..=8, len in 0usize..50, seed: u64, mask: u64) {
        let c = common::rich_circuit(n, len, seed).with_dead(common::dead_from_mask(n, mask)).unwrap();
        let source = SourceCircuit::from_circuit(c);
        let text = source.to_qasm();
        let back = parse(&text).unwrap();
        prop_assert_eq!(back.circuit.dead(), source.circuit.dead());
        prop_assert_eq!(&back.measures, &source.measures);
        prop_assert_eq!(
            back.circuit.gates().map(|g| &g.kind).collect::<Vec<_>>(),
            source.circuit.gates().map(|g| &g.kind).collect::<Vec<_>>()
        );
        prop_assert_eq!(back.to_qasm(), text);
    }

    #[test]
    fn optimized_output_reparses_with_mapped_measures(n in 2usize..=8, len in 0usize..50, seed: u64, mask: u64) {
        let c = common::rich_circuit(n, len, seed).with_dead(common::dead_from_mask(n, mask)).unwrap();
        let source = SourceCircuit::from_circuit(c);
        let (opt, report) = eliminate_dead_gates(source.circuit.clone(), PassConfig::default());
        let text = source.with_circuit(opt.clone()).to_qasm();
        let back = parse(&text).unwrap();
        prop_assert_eq!(back.circuit.dead(), opt.dead());
        prop_assert_eq!(back.circuit.len(), opt.len());
        for (m_old, m_new) in source.measures.iter().zip(&back.measures) {
            prop_assert_eq!(m_old.clbit, m_new.clbit);
            prop_assert_eq!(m_new.qubit, report.outcome_map.wire_of(m_old.qubit));
        }
    }
}
