#![allow(dead_code)]

use std::collections::BTreeSet;

use dge_core::{BaseGate, Circuit, GateKind, QubitId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random circuit over the whole gate vocabulary: every base gate, 1–3
/// controls, SWAP, and opaque blocks `A` (1 qubit) and `B` (2 qubits).
pub fn rich_circuit(n: usize, gates: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::empty(n);
    for _ in 0..gates {
        let mut wires: Vec<usize> = (0..n).collect();
        wires.shuffle(&mut rng);
        let base = random_base(&mut rng);
        let kind = match rng.random_range(0..10) {
            0..=3 => GateKind::single(base, wires[0]),
            4..=6 if n >= 2 => {
                let k = rng.random_range(1..=3.min(n - 1));
                GateKind::controlled(base, &wires[1..=k], wires[0])
            }
            7 if n >= 2 => GateKind::swap(wires[0], wires[1]),
            8 => GateKind::opaque("A", &wires[..1]),
            9 if n >= 2 => GateKind::opaque("B", &wires[..2]),
            _ => GateKind::single(base, wires[0]),
        };
        c.push(kind).unwrap();
    }
    c
}

pub fn random_base<R: Rng>(rng: &mut R) -> BaseGate {
    let angle = |rng: &mut R| rng.random_range(-3.2..3.2);
    match rng.random_range(0..12) {
        0..=7 => BaseGate::CLIFFORD_T[rng.random_range(0..8)],
        8 => BaseGate::Rx(angle(rng)),
        9 => BaseGate::Ry(angle(rng)),
        10 => BaseGate::Rz(angle(rng)),
        _ => BaseGate::U3(angle(rng), angle(rng), angle(rng)),
    }
}

pub fn dead_from_mask(n: usize, mask: u64) -> BTreeSet<QubitId> {
    (0..n).filter(|i| mask >> i & 1 == 1).map(QubitId).collect()
}

/// Frontier by definition: gates with no later gate on any of their wires.
pub fn brute_force_frontier(c: &Circuit) -> Vec<usize> {
    let gates: Vec<_> = c.gates().collect();
    gates
        .iter()
        .enumerate()
        .filter(|(i, g)| {
            let qs = g.kind.qubits();
            gates[i + 1..].iter().all(|h| h.kind.qubits().iter().all(|q| !qs.contains(q)))
        })
        .map(|(_, g)| g.id.0)
        .collect()
}
