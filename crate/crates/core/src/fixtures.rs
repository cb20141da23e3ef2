//! Reference circuits: the worked examples, the VQE ansatz, a QPE instance
//! and the invalid-simplification counterexamples.
//!
//! Opaque blocks keep symbolic labels; bind them with
//! [`OpaqueBindings::haar_for_circuits`](crate::sim::OpaqueBindings::haar_for_circuits)
//! before simulating.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{BaseGate, Circuit, GateKind, QubitId};
use crate::qasm::{Measure, OpaqueDecl, SourceCircuit};
use crate::sim::{EquivalenceOptions, EquivalenceVerdict, OpaqueBindings, SimError, Verifier};

/// The V1 rotation of the controlled-controlled gate in [`fig2`].
pub const FIG2_V1: BaseGate = BaseGate::U3(0.3, 0.2, 0.1);
/// The V2 rotation of the controlled gate in [`fig2`].
pub const FIG2_V2: BaseGate = BaseGate::U3(0.5, -0.4, PI / 3.0);

fn build(n: usize, gates: Vec<GateKind>, dead: &[usize]) -> Circuit {
    Circuit::new(n, gates, dead.iter().map(|&q| QubitId(q))).expect("fixture is well formed")
}

/// Three qubits, q0 discarded: U3 block, CX(q1→q0), W1 on q2, CCV1(q1,q2→q0),
/// CV2(q2→q0). Gate ids 0..=4 in that order.
pub fn fig2() -> Circuit {
    build(
        3,
        vec![
            GateKind::opaque("U3", &[0, 1, 2]),
            GateKind::cx(1, 0),
            GateKind::opaque("W1", &[2]),
            GateKind::controlled(FIG2_V1, &[1, 2], 0),
            GateKind::controlled(FIG2_V2, &[2], 0),
        ],
        &[0],
    )
}

/// [`fig2`] after simplification: only U3 and W1 remain.
pub fn fig3() -> Circuit {
    build(
        3,
        vec![GateKind::opaque("U3", &[0, 1, 2]), GateKind::opaque("W1", &[2])],
        &[0],
    )
}

/// The frontier example: its frontier is `{V5, U2}` (ids 7 and 6).
pub fn frontier_example() -> Circuit {
    let v = |k: f64| BaseGate::U3(0.1 * k, 0.2 * k, 0.3 * k);
    build(
        3,
        vec![
            GateKind::cx(0, 1),
            GateKind::single(v(4.0), 2),
            GateKind::single(v(1.0), 0),
            GateKind::single(v(2.0), 1),
            GateKind::opaque("U1", &[0, 1]),
            GateKind::cx(1, 2),
            GateKind::opaque("U2", &[0, 1]),
            GateKind::single(v(5.0), 2),
        ],
        &[0],
    )
}

/// Rotation angle θ_j (1-based) of the VQE ansatz.
pub fn vqe_theta(j: usize) -> f64 {
    0.1 * j as f64 + 0.05
}

/// VQE ansatz A1 with q0 and q1 discarded. Ids: U4 block 0, then RZ(θ1)
/// RY(θ2) on q0, RZ(θ3) RY(θ4) on q1, … (ids 1–8), CZ(q0,q1) 9,
/// CX(q2→q0) 10, CX(q3→q1) 11.
pub fn vqe_a1() -> Circuit {
    let mut gates = vec![GateKind::opaque("U4", &[0, 1, 2, 3])];
    for q in 0..4 {
        gates.push(GateKind::rz(vqe_theta(2 * q + 1), q));
        gates.push(GateKind::ry(vqe_theta(2 * q + 2), q));
    }
    gates.push(GateKind::cz(0, 1));
    gates.push(GateKind::cx(2, 0));
    gates.push(GateKind::cx(3, 1));
    build(4, gates, &[0, 1])
}

/// The simplified ansatz A2: U4 followed by the q2 and q3 rotations.
pub fn vqe_a2() -> Circuit {
    let mut gates = vec![GateKind::opaque("U4", &[0, 1, 2, 3])];
    for q in 2..4 {
        gates.push(GateKind::rz(vqe_theta(2 * q + 1), q));
        gates.push(GateKind::ry(vqe_theta(2 * q + 2), q));
    }
    build(4, gates, &[0, 1])
}

/// Controlled phase `diag(1, e^{iλ})` on the target.
fn cphase(lambda: f64, control: usize, target: usize) -> GateKind {
    GateKind::controlled(BaseGate::U3(0.0, 0.0, lambda), &[control], target)
}

/// Phase estimation with `m + 1` counting qubits q0..=qm (q0 holds the most
/// significant phase bit) and one eigen qubit per entry of `phases`.
///
/// Eigen qubit `i` is prepared in |1⟩ and the oracle multiplies it by
/// `e^{2πi·phases[i]}`, so the estimated phase is the sum of `phases`. The
/// inverse Fourier transform is written as a front part on q1..=qm followed
/// by R_m†…R_1† onto q0 and a final H on q0. Only q0 is discarded.
pub fn qpe(m: usize, phases: &[f64]) -> Circuit {
    let counting = m + 1;
    let n = counting + phases.len();
    let mut gates = Vec::new();
    for q in 0..counting {
        gates.push(GateKind::h(q));
    }
    for i in 0..phases.len() {
        gates.push(GateKind::x(counting + i));
    }
    for k in 0..counting {
        let power = (1u64 << k) as f64;
        for (i, phi) in phases.iter().enumerate() {
            gates.push(cphase(2.0 * PI * power * phi, k, counting + i));
        }
    }
    for j in (1..=m).rev() {
        for k in (j + 1..=m).rev() {
            gates.push(cphase(-2.0 * PI / (1u64 << (k - j + 1)) as f64, k, j));
        }
        gates.push(GateKind::h(j));
    }
    for k in (1..=m).rev() {
        gates.push(cphase(-2.0 * PI / (1u64 << (k + 1)) as f64, k, 0));
    }
    gates.push(GateKind::h(0));
    build(n, gates, &[0])
}

/// Eigen phases of the reference QPE instance; they sum to 22/32 = 0.10110₂.
pub const QPE_PHASES: [f64; 2] = [0.5, 6.0 / 32.0];

/// The reference QPE instance: m = 4, two eigen qubits, seven qubits total.
pub fn qpe_m4() -> Circuit {
    qpe(4, &QPE_PHASES)
}

/// The general invalid-simplification pattern: U0 on (q0, q1), V on q0
/// controlled by q1, then W on q1. q0 is discarded. Returns
/// `(original, invalid)` where `invalid` drops the controlled gate.
pub fn counterexample_general() -> (Circuit, Circuit) {
    let v = BaseGate::U3(1.1, 0.4, -0.7);
    let original = build(
        2,
        vec![
            GateKind::opaque("U0", &[0, 1]),
            GateKind::controlled(v, &[1], 0),
            GateKind::opaque("W", &[1]),
        ],
        &[0],
    );
    let invalid = build(
        2,
        vec![GateKind::opaque("U0", &[0, 1]), GateKind::opaque("W", &[1])],
        &[0],
    );
    (original, invalid)
}

/// CX(q0→q1) written as `H⊗H · CX(q1→q0) · H⊗H`, with q0 discarded, and the
/// invalid variant with the CX dropped.
pub fn counterexample_cx() -> (Circuit, Circuit) {
    let original = build(
        2,
        vec![GateKind::h(0), GateKind::h(1), GateKind::cx(1, 0), GateKind::h(0), GateKind::h(1)],
        &[0],
    );
    let invalid = build(
        2,
        vec![GateKind::h(0), GateKind::h(1), GateKind::h(0), GateKind::h(1)],
        &[0],
    );
    (original, invalid)
}

/// CZ variant: the CZ's target (q1) is discarded but an H on q0 follows it.
pub fn counterexample_cz() -> (Circuit, Circuit) {
    let original = build(
        2,
        vec![GateKind::h(0), GateKind::h(1), GateKind::cz(0, 1), GateKind::h(0)],
        &[1],
    );
    let invalid = build(2, vec![GateKind::h(0), GateKind::h(1), GateKind::h(0)], &[1]);
    (original, invalid)
}

/// Wraps a fixture as a program. With `measure_all` every wire `i` is
/// measured into `c[i]` and dead wires get a discard pragma; otherwise only
/// valid wires are measured.
pub fn to_source(circuit: Circuit, measure_all: bool) -> SourceCircuit {
    if !measure_all {
        return SourceCircuit::from_circuit(circuit);
    }
    let n = circuit.num_qubits();
    let opaques = circuit
        .opaque_blocks()
        .into_iter()
        .map(|(label, arity)| OpaqueDecl { label, arity })
        .collect();
    SourceCircuit {
        measures: (0..n).map(|i| Measure { qubit: QubitId(i), clbit: i }).collect(),
        opaques,
        clbits: n,
        circuit,
    }
}

/// The on-disk fixture corpus: file stem and program.
pub fn corpus() -> Vec<(&'static str, SourceCircuit)> {
    let (ce_general, ce_general_bad) = counterexample_general();
    let (ce_cx, ce_cx_bad) = counterexample_cx();
    let (ce_cz, ce_cz_bad) = counterexample_cz();
    vec![
        ("fig4", to_source(fig2(), false)),
        ("fig5", to_source(fig3(), false)),
        ("vqe_a1", to_source(vqe_a1(), true)),
        ("vqe_a2", to_source(vqe_a2(), true)),
        ("qpe_m4", to_source(qpe_m4(), true)),
        ("counterexample_general", to_source(ce_general, false)),
        ("counterexample_general_invalid", to_source(ce_general_bad, false)),
        ("counterexample_cx", to_source(ce_cx, false)),
        ("counterexample_cx_invalid", to_source(ce_cx_bad, false)),
        ("counterexample_cz", to_source(ce_cz, false)),
        ("counterexample_cz_invalid", to_source(ce_cz_bad, false)),
    ]
}

/// One randomized instance of a removal rule: `with_gate` is an arbitrary
/// block U followed by the removable gate, `without` is U alone.
#[derive(Debug, Clone)]
pub struct RuleInstance {
    pub with_gate: Circuit,
    pub without: Circuit,
    pub dead_first: BTreeSet<QubitId>,
    pub dead_second: BTreeSet<QubitId>,
    /// Dead-wire pairing for the relabelling case; empty otherwise.
    pub pairing: Vec<(QubitId, QubitId)>,
    pub seed: u64,
}

impl RuleInstance {
    /// Checks the two circuits with Haar-random bindings for U drawn from
    /// the instance seed.
    pub fn check(&self, samples: usize, tol: f64) -> Result<EquivalenceVerdict, SimError> {
        let bindings = OpaqueBindings::haar_for_circuits([&self.with_gate], self.seed);
        let options = EquivalenceOptions {
            samples,
            seed: self.seed,
            tol,
            ..EquivalenceOptions::default()
        };
        let verifier = Verifier::new(options, bindings);
        if self.pairing.is_empty() {
            verifier.check_equiv(&self.with_gate, &self.without, &self.dead_first)
        } else {
            verifier.check_equiv_extended(
                &self.with_gate,
                &self.without,
                &self.dead_first,
                &self.dead_second,
                &self.pairing,
            )
        }
    }
}

fn random_u3<R: Rng>(rng: &mut R) -> BaseGate {
    BaseGate::U3(
        rng.random_range(0.0..PI),
        rng.random_range(-PI..PI),
        rng.random_range(-PI..PI),
    )
}

fn instance(n: usize, gate: GateKind, dead_first: &[usize], dead_second: &[usize], pairing: Vec<(usize, usize)>, seed: u64) -> RuleInstance {
    let all: Vec<usize> = (0..n).collect();
    let u = GateKind::opaque("U", &all);
    let with_gate = build(n, vec![u.clone(), gate], dead_first);
    let without = build(n, vec![u], dead_second);
    RuleInstance {
        dead_first: with_gate.dead().clone(),
        dead_second: without.dead().clone(),
        with_gate,
        without,
        pairing: pairing.into_iter().map(|(e, f)| (QubitId(e), QubitId(f))).collect(),
        seed,
    }
}

/// A random single-qubit V on a dead wire after an arbitrary n-qubit U,
/// with `2 <= n <= max_n`.
pub fn single_on_dead_instance(seed: u64, max_n: usize) -> RuleInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    let q = rng.random_range(0..n);
    let v = random_u3(&mut rng);
    instance(n, GateKind::single(v, q), &[q], &[q], Vec::new(), seed)
}

/// A random V on a dead target with `controls` controls drawn from the other
/// wires, any of which may also be dead.
pub fn controlled_target_dead_instance(seed: u64, controls: usize, max_n: usize) -> RuleInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(controls + 1..=max_n.max(controls + 1));
    let mut wires: Vec<usize> = (0..n).collect();
    wires.shuffle(&mut rng);
    let target = wires[0];
    let ctrl = &wires[1..=controls];
    let mut dead = vec![target];
    for &w in &wires[1..] {
        if rng.random_bool(0.3) {
            dead.push(w);
        }
    }
    if dead.len() == n {
        dead.pop();
    }
    let v = random_u3(&mut rng);
    let gate = GateKind::controlled(v, ctrl, target);
    instance(n, gate, &dead, &dead, Vec::new(), seed)
}

/// A SWAP between a dead wire `a` and a valid wire `b` after an arbitrary U.
/// Removing it requires reading `a` in place of `b`.
pub fn swap_instance(seed: u64, max_n: usize) -> RuleInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    let mut wires: Vec<usize> = (0..n).collect();
    wires.shuffle(&mut rng);
    let (a, b) = (wires[0], wires[1]);
    let mut extra = Vec::new();
    for &w in &wires[2..] {
        if rng.random_bool(0.3) {
            extra.push(w);
        }
    }
    let mut dead_first = vec![a];
    dead_first.extend(&extra);
    let mut dead_second = vec![b];
    dead_second.extend(&extra);
    instance(n, GateKind::swap(a, b), &dead_first, &dead_second, vec![(a, b)], seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateId;
    use crate::pass::{eliminate_dead_gates, PassConfig, RemovalRule};
    use crate::sim::{OpaqueBindings, Simulator, Statevector};

    #[test]
    fn qpe_reads_out_the_phase_bits() {
        let c = qpe_m4();
        assert_eq!(c.num_qubits(), 7);
        let sim = Simulator::new(OpaqueBindings::new());
        let out = sim.simulate(&c, &Statevector::zero(7)).unwrap();
        let counting: Vec<QubitId> = (0..5).map(QubitId).collect();
        let p = out.marginal(&counting).unwrap().probability("10110").unwrap();
        assert!((p - 1.0).abs() < 1e-9, "p = {p}");
    }

    #[test]
    fn qpe_pass_trace() {
        let (opt, report) = eliminate_dead_gates(qpe_m4(), PassConfig::default());
        assert_eq!(report.removed.len(), 5);
        assert_eq!(report.count_by_rule(RemovalRule::ControlledTargetDead), 4);
        assert_eq!(report.count_by_rule(RemovalRule::SingleOnDead), 1);
        assert_eq!(report.iterations, 6);
        assert_eq!(opt.len(), qpe_m4().len() - 5);
    }

    #[test]
    fn vqe_pass_trace() {
        let (opt, report) = eliminate_dead_gates(vqe_a1(), PassConfig::default());
        let ids: Vec<usize> = report.removed_ids().iter().map(|g| g.0).collect();
        assert_eq!(ids, vec![10, 11, 9, 2, 4, 1, 3]);
        assert_eq!(report.iterations, 5);
        let kinds: Vec<&GateKind> = opt.gates().map(|g| &g.kind).collect();
        let expected = vqe_a2();
        assert_eq!(kinds, expected.gates().map(|g| &g.kind).collect::<Vec<_>>());
    }

    #[test]
    fn fig2_pass_keeps_fig3() {
        let (opt, report) = eliminate_dead_gates(fig2(), PassConfig::default());
        assert_eq!(report.removed_ids(), vec![GateId(4), GateId(3), GateId(1)]);
        assert_eq!(
            opt.gates().map(|g| &g.kind).collect::<Vec<_>>(),
            fig3().gates().map(|g| &g.kind).collect::<Vec<_>>()
        );
    }

    #[test]
    fn counterexamples_keep_the_controlled_gate() {
        for (original, _) in [counterexample_general(), counterexample_cx(), counterexample_cz()] {
            let (opt, _) = eliminate_dead_gates(original.clone(), PassConfig::default());
            let controlled = original
                .gates()
                .find(|g| matches!(g.kind, GateKind::Controlled { .. }))
                .unwrap()
                .id;
            assert!(opt.contains(controlled));
        }
    }

    #[test]
    fn frontier_example_frontier() {
        assert_eq!(frontier_example().frontier(), vec![GateId(6), GateId(7)]);
    }
}
