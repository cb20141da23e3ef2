//! Dead-gate elimination.
//!
//! A gate is removed only while it sits in the frontier (last on every wire
//! it touches) and one of the structural rules applies:
//!
//! * **R1** a single-qubit gate on a dead wire;
//! * **R2** a controlled single-qubit gate whose target is dead (the
//!   controls may be dead or valid);
//! * **R3** a SWAP with a dead endpoint. With exactly one dead endpoint the
//!   dead status moves to the other wire and the outcome map is composed
//!   with the transposition; with both endpoints dead nothing is relabelled;
//! * **R4** (extension, off by default) any gate, opaque blocks included,
//!   all of whose wires are dead.
//!
//! [`eliminate_dead_gates`] sweeps the frontier until a sweep removes
//! nothing. Each sweep works on a snapshot of the frontier taken at its start,
//! visited in ascending gate id; gates that become frontier mid-sweep wait for
//! the next sweep.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, GateId, GateKind, OutcomeMap, QubitId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RemovalRule {
    #[serde(rename = "R1_single_on_dead")]
    SingleOnDead,
    #[serde(rename = "R2_controlled_target_dead")]
    ControlledTargetDead,
    #[serde(rename = "R3_swap_relabel")]
    SwapRelabel,
    #[serde(rename = "R4_all_dead_unitary")]
    AllDeadUnitary,
}

impl RemovalRule {
    pub fn tag(self) -> &'static str {
        match self {
            RemovalRule::SingleOnDead => "R1_single_on_dead",
            RemovalRule::ControlledTargetDead => "R2_controlled_target_dead",
            RemovalRule::SwapRelabel => "R3_swap_relabel",
            RemovalRule::AllDeadUnitary => "R4_all_dead_unitary",
        }
    }
}

impl fmt::Display for RemovalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Which rules the pass may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassConfig {
    /// Enables R3.
    pub swap_relabel: bool,
    /// Enables R4.
    pub extended: bool,
}

impl Default for PassConfig {
    fn default() -> Self {
        PassConfig {
            swap_relabel: true,
            extended: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PassError {
    #[error("gate {0} is not in the frontier")]
    NotInFrontier(GateId),
    #[error("gate {gate}: requested rule {requested}, but {}", match .found { Some(r) => format!("rule {r} applies"), None => "no rule applies".to_string() })]
    RuleMismatch {
        gate: GateId,
        requested: RemovalRule,
        found: Option<RemovalRule>,
    },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// One removal performed by the pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Removal {
    pub gate: GateId,
    pub summary: String,
    pub rule: RemovalRule,
    /// 1-based sweep in which the gate was removed.
    pub sweep: usize,
}

/// What the pass did to one circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub config: PassConfig,
    /// Removals in the order they happened.
    pub removed: Vec<Removal>,
    /// Number of frontier snapshots taken, including the final one that
    /// removed nothing (or was empty).
    pub iterations: usize,
    /// Number of rule checks performed, summed over all sweeps.
    pub gate_checks: usize,
    pub initial_gate_count: usize,
    pub final_gate_count: usize,
    pub initial_dead: BTreeSet<QubitId>,
    pub final_dead: BTreeSet<QubitId>,
    pub outcome_map: OutcomeMap,
}

impl OptimizationReport {
    pub fn removed_ids(&self) -> Vec<GateId> {
        self.removed.iter().map(|r| r.gate).collect()
    }

    pub fn count_by_rule(&self, rule: RemovalRule) -> usize {
        self.removed.iter().filter(|r| r.rule == rule).count()
    }
}

/// Classifies a frontier gate.
pub fn is_dead_gate(
    circuit: &Circuit,
    id: GateId,
    config: PassConfig,
) -> Result<Option<RemovalRule>, PassError> {
    let gate = circuit.gate(id).ok_or(CircuitError::UnknownGate(id))?;
    if !circuit.in_frontier(id) {
        return Err(PassError::NotInFrontier(id));
    }
    Ok(classify(circuit, gate, config))
}

fn classify(circuit: &Circuit, gate: &Gate, config: PassConfig) -> Option<RemovalRule> {
    let dead = |q: &QubitId| circuit.is_dead(*q);
    let structural = match &gate.kind {
        GateKind::Single { qubit, .. } if dead(qubit) => Some(RemovalRule::SingleOnDead),
        GateKind::Controlled { target, .. } if dead(target) => Some(RemovalRule::ControlledTargetDead),
        GateKind::Swap { a, b } if config.swap_relabel && (dead(a) || dead(b)) => {
            Some(RemovalRule::SwapRelabel)
        }
        _ => None,
    };
    structural.or_else(|| {
        (config.extended && gate.kind.qubits().iter().all(dead)).then_some(RemovalRule::AllDeadUnitary)
    })
}

/// Removes gate `id` under `rule`, relabelling wires for a one-dead-endpoint
/// SWAP.
pub fn apply_removal(
    circuit: &mut Circuit,
    id: GateId,
    rule: RemovalRule,
    config: PassConfig,
) -> Result<Gate, PassError> {
    let found = is_dead_gate(circuit, id, config)?;
    if found != Some(rule) {
        return Err(PassError::RuleMismatch {
            gate: id,
            requested: rule,
            found,
        });
    }
    let gate = circuit.remove_gate(id)?;
    if let GateKind::Swap { a, b } = gate.kind {
        if circuit.is_dead(a) != circuit.is_dead(b) {
            circuit.relabel_wires(a, b);
        }
    }
    Ok(gate)
}

/// Runs the frontier sweeps to a fixpoint.
pub fn eliminate_dead_gates(mut circuit: Circuit, config: PassConfig) -> (Circuit, OptimizationReport) {
    let initial_gate_count = circuit.len();
    let initial_dead = circuit.dead().clone();
    let mut removed = Vec::new();
    let mut iterations = 0;
    let mut gate_checks = 0;

    loop {
        let frontier = circuit.frontier();
        iterations += 1;
        if frontier.is_empty() {
            break;
        }
        let mut changed = false;
        for id in frontier {
            gate_checks += 1;
            let gate = circuit.gate(id).expect("frontier gates stay live within a sweep");
            let Some(rule) = classify(&circuit, gate, config) else {
                continue;
            };
            let summary = gate.kind.to_string();
            apply_removal(&mut circuit, id, rule, config).expect("rule was just checked");
            removed.push(Removal {
                gate: id,
                summary,
                rule,
                sweep: iterations,
            });
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let report = OptimizationReport {
        config,
        removed,
        iterations,
        gate_checks,
        initial_gate_count,
        final_gate_count: circuit.len(),
        initial_dead,
        final_dead: circuit.dead().clone(),
        outcome_map: circuit.outcome_map().clone(),
    };
    (circuit, report)
}

/// Work counters of one default-configuration run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityProbe {
    pub gate_checks: usize,
    pub sweeps: usize,
}

impl ComplexityProbe {
    /// The quadratic worst-case bound `|G|·(|G|+1)` on rule checks.
    pub fn within_quadratic_bound(&self, gates: usize) -> bool {
        self.gate_checks <= gates * (gates + 1)
    }
}

pub fn complexity_probe(circuit: &Circuit) -> ComplexityProbe {
    let (_, report) = eliminate_dead_gates(circuit.clone(), PassConfig::default());
    ComplexityProbe {
        gate_checks: report.gate_checks,
        sweeps: report.iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::BaseGate;

    fn q(i: usize) -> QubitId {
        QubitId(i)
    }

    fn fig2() -> Circuit {
        let v = BaseGate::U3(0.3, 0.2, 0.1);
        Circuit::new(
            3,
            [
                GateKind::opaque("U3", &[0, 1, 2]),
                GateKind::cx(1, 0),
                GateKind::opaque("W1", &[2]),
                GateKind::controlled(v, &[1, 2], 0),
                GateKind::controlled(v, &[2], 0),
            ],
            [q(0)],
        )
        .unwrap()
    }

    #[test]
    fn fig2_classification() {
        let c = fig2();
        let config = PassConfig::default();
        assert_eq!(
            is_dead_gate(&c, GateId(4), config).unwrap(),
            Some(RemovalRule::ControlledTargetDead)
        );
        assert_eq!(
            is_dead_gate(&c, GateId(3), config).unwrap_err(),
            PassError::NotInFrontier(GateId(3))
        );
    }

    #[test]
    fn fig2_fixpoint() {
        let (out, report) = eliminate_dead_gates(fig2(), PassConfig::default());
        assert_eq!(report.removed_ids(), vec![GateId(4), GateId(3), GateId(1)]);
        assert!(report.removed.iter().all(|r| r.rule == RemovalRule::ControlledTargetDead));
        assert_eq!(
            report.removed.iter().map(|r| r.sweep).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        assert_eq!(report.iterations, 4);
        assert_eq!(out.gate_ids(), vec![GateId(0), GateId(2)]);
        assert_eq!(report.initial_gate_count - report.final_gate_count, 3);
    }

    #[test]
    fn valid_wire_gate_is_not_dead() {
        let c = Circuit::new(2, [GateKind::h(1)], [q(0)]).unwrap();
        assert_eq!(is_dead_gate(&c, GateId(0), PassConfig::default()).unwrap(), None);
    }

    #[test]
    fn swap_relabels() {
        let mut c = Circuit::new(2, [GateKind::swap(0, 1)], [q(0)]).unwrap();
        let config = PassConfig::default();
        assert_eq!(is_dead_gate(&c, GateId(0), config).unwrap(), Some(RemovalRule::SwapRelabel));
        apply_removal(&mut c, GateId(0), RemovalRule::SwapRelabel, config).unwrap();
        assert_eq!(c.dead().iter().copied().collect::<Vec<_>>(), vec![q(1)]);
        assert_eq!(c.outcome_map().wire_of(q(1)), q(0));
    }

    #[test]
    fn both_dead_swap_keeps_labels() {
        let c = Circuit::new(3, [GateKind::swap(0, 1)], [q(0), q(1)]).unwrap();
        let (out, report) = eliminate_dead_gates(c, PassConfig::default());
        assert_eq!(report.count_by_rule(RemovalRule::SwapRelabel), 1);
        assert!(out.outcome_map().is_identity());
        assert_eq!(out.dead().len(), 2);
    }

    #[test]
    fn swap_relabel_can_be_disabled() {
        let c = Circuit::new(2, [GateKind::swap(0, 1)], [q(0)]).unwrap();
        let config = PassConfig {
            swap_relabel: false,
            extended: false,
        };
        let (out, report) = eliminate_dead_gates(c, config);
        assert!(report.removed.is_empty());
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn single_gate_rule_leaves_dead_set() {
        let mut c = Circuit::new(2, [GateKind::opaque("U", &[0, 1]), GateKind::h(0)], [q(0)]).unwrap();
        apply_removal(&mut c, GateId(1), RemovalRule::SingleOnDead, PassConfig::default()).unwrap();
        assert_eq!(c.dead().len(), 1);
        assert!(c.is_dead(q(0)));
        assert!(c.outcome_map().is_identity());
    }

    #[test]
    fn rule_mismatch_and_removed_gate() {
        let mut c = Circuit::new(2, [GateKind::cx(1, 0)], [q(0)]).unwrap();
        let config = PassConfig::default();
        assert!(matches!(
            apply_removal(&mut c, GateId(0), RemovalRule::SingleOnDead, config),
            Err(PassError::RuleMismatch { .. })
        ));
        apply_removal(&mut c, GateId(0), RemovalRule::ControlledTargetDead, config).unwrap();
        assert!(matches!(
            is_dead_gate(&c, GateId(0), config),
            Err(PassError::Circuit(CircuitError::UnknownGate(_)))
        ));
    }

    #[test]
    fn extension_removes_all_dead_blocks() {
        let c = Circuit::new(3, [GateKind::opaque("U", &[0, 1]), GateKind::cx(2, 1)], [q(0), q(1)]).unwrap();
        let (_, plain) = eliminate_dead_gates(c.clone(), PassConfig::default());
        assert_eq!(plain.removed.len(), 1);
        let extended = PassConfig {
            extended: true,
            ..PassConfig::default()
        };
        let (out, report) = eliminate_dead_gates(c, extended);
        assert_eq!(report.count_by_rule(RemovalRule::AllDeadUnitary), 1);
        assert!(out.is_empty());
        assert!(plain.removed.iter().all(|r| r.rule != RemovalRule::AllDeadUnitary));
    }

    #[test]
    fn no_dead_qubits_single_sweep() {
        let c = Circuit::new(2, [GateKind::h(0), GateKind::cx(0, 1)], []).unwrap();
        let (_, report) = eliminate_dead_gates(c, PassConfig::default());
        assert!(report.removed.is_empty());
        assert_eq!(report.iterations, 1);
    }

    #[test]
    fn probe_on_empty() {
        let probe = complexity_probe(&Circuit::empty(3));
        assert_eq!(probe, ComplexityProbe { gate_checks: 0, sweeps: 1 });
    }

    #[test]
    fn blocked_controlled_gate_survives() {
        // CX(q1→q0) with q0 dead, followed by H on the control wire.
        let c = Circuit::new(2, [GateKind::cx(1, 0), GateKind::h(1)], [q(0)]).unwrap();
        let (out, report) = eliminate_dead_gates(c, PassConfig::default());
        assert!(report.removed.is_empty());
        assert_eq!(out.len(), 2);
    }
}
