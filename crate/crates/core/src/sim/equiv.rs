//! Randomized equivalence checking on the valid (non-discarded) outcomes.
//!
//! Two circuits are compared by running both on the same random input states
//! and comparing the outcome distribution of the wires each circuit reports.
//! A random state exposes an inequivalence almost surely, but the check is
//! probabilistic: an `equivalent` verdict is evidence, not proof.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::state::{Simulator, Statevector, DEFAULT_QUBIT_LIMIT};
use super::unitary::OpaqueBindings;
use super::SimError;
use crate::circuit::{Circuit, QubitId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub qubit_limit: usize,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions {
            samples: 20,
            seed: 0,
            tol: 1e-9,
            qubit_limit: DEFAULT_QUBIT_LIMIT,
        }
    }
}

/// Where the largest discrepancy was seen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Base seed and sample index; the input state is stream `sample` of a
    /// ChaCha8 generator seeded with `seed`.
    pub seed: u64,
    pub sample: usize,
    /// Outcome over the first circuit's valid wires (ascending), leading
    /// bit first.
    pub bitstring: String,
    pub p_first: f64,
    pub p_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub max_discrepancy: f64,
    pub samples: usize,
    pub tol: f64,
    pub witness: Option<Witness>,
}

/// Runs equivalence checks with fixed options and opaque bindings.
#[derive(Debug, Clone)]
pub struct Verifier {
    options: EquivalenceOptions,
    simulator: Simulator,
}

impl Verifier {
    pub fn new(options: EquivalenceOptions, bindings: OpaqueBindings) -> Self {
        let simulator = Simulator::new(bindings).with_qubit_limit(options.qubit_limit);
        Verifier { options, simulator }
    }

    pub fn options(&self) -> &EquivalenceOptions {
        &self.options
    }

    /// Input state for sample `index`.
    pub fn sample_state(&self, n: usize, index: usize) -> Statevector {
        let mut rng = ChaCha8Rng::seed_from_u64(self.options.seed);
        rng.set_stream(index as u64);
        Statevector::random(n, &mut rng)
    }

    /// Equivalence relative to the dead set `dead`: both circuits are read on
    /// the same wires, the complement of `dead` in ascending order.
    pub fn check_equiv(
        &self,
        first: &Circuit,
        second: &Circuit,
        dead: &BTreeSet<QubitId>,
    ) -> Result<EquivalenceVerdict, SimError> {
        let n = first.num_qubits();
        if let Some(q) = dead.iter().find(|q| q.0 >= n) {
            return Err(SimError::QubitOutOfRange { qubit: *q, n });
        }
        let valid: Vec<QubitId> = (0..n).map(QubitId).filter(|q| !dead.contains(q)).collect();
        self.check_mapped(first, second, &valid, &valid)
    }

    /// Equivalence up to re-identifying dead wires. `pairing` maps each wire
    /// of `dead_first \ dead_second` to a wire of `dead_second \ dead_first`;
    /// the second circuit is read on the first circuit's valid wires with
    /// every paired wire replaced by its partner.
    pub fn check_equiv_extended(
        &self,
        first: &Circuit,
        second: &Circuit,
        dead_first: &BTreeSet<QubitId>,
        dead_second: &BTreeSet<QubitId>,
        pairing: &[(QubitId, QubitId)],
    ) -> Result<EquivalenceVerdict, SimError> {
        let n = first.num_qubits();
        if dead_first.len() != dead_second.len() {
            return Err(SimError::DeadSetSize(dead_first.len(), dead_second.len()));
        }
        if let Some(q) = dead_first.iter().chain(dead_second).find(|q| q.0 >= n) {
            return Err(SimError::QubitOutOfRange { qubit: *q, n });
        }
        let only_first: BTreeSet<QubitId> = dead_first.difference(dead_second).copied().collect();
        let only_second: BTreeSet<QubitId> = dead_second.difference(dead_first).copied().collect();
        let keys: BTreeSet<QubitId> = pairing.iter().map(|(e, _)| *e).collect();
        let values: BTreeSet<QubitId> = pairing.iter().map(|(_, f)| *f).collect();
        if keys != only_first || values != only_second || pairing.len() != only_first.len() {
            return Err(SimError::InvalidPairing);
        }
        // f (valid in the first circuit) is read from e in the second.
        let replace: BTreeMap<QubitId, QubitId> = pairing.iter().map(|(e, f)| (*f, *e)).collect();
        let valid: Vec<QubitId> = (0..n).map(QubitId).filter(|q| !dead_first.contains(q)).collect();
        let substituted: Vec<QubitId> = valid.iter().map(|q| *replace.get(q).unwrap_or(q)).collect();
        self.check_mapped(first, second, &valid, &substituted)
    }

    /// Checks an optimized circuit against its original, reading each valid
    /// measurement label on the wire each circuit's outcome map assigns it.
    pub fn check_optimized(&self, original: &Circuit, optimized: &Circuit) -> Result<EquivalenceVerdict, SimError> {
        let n = original.num_qubits();
        let labels: Vec<QubitId> = (0..n)
            .map(QubitId)
            .filter(|l| !original.is_dead(original.outcome_map().wire_of(*l)))
            .collect();
        let first: Vec<QubitId> = labels.iter().map(|l| original.outcome_map().wire_of(*l)).collect();
        let second: Vec<QubitId> = labels.iter().map(|l| optimized.outcome_map().wire_of(*l)).collect();
        self.check_mapped(original, optimized, &first, &second)
    }

    /// The general form: marginal of `first` over `read_first` against
    /// marginal of `second` over `read_second`, position by position.
    pub fn check_mapped(
        &self,
        first: &Circuit,
        second: &Circuit,
        read_first: &[QubitId],
        read_second: &[QubitId],
    ) -> Result<EquivalenceVerdict, SimError> {
        let n = first.num_qubits();
        if second.num_qubits() != n {
            return Err(SimError::QubitCountMismatch(n, second.num_qubits()));
        }
        if read_first.len() != read_second.len() {
            return Err(SimError::ReadoutLength(read_first.len(), read_second.len()));
        }
        self.simulator.check_size(n)?;

        let per_sample: Vec<(f64, usize, f64, f64)> = (0..self.options.samples)
            .into_par_iter()
            .map(|sample| {
                let input = self.sample_state(n, sample);
                let out1 = self.simulator.simulate(first, &input)?.marginal(read_first)?;
                let out2 = self.simulator.simulate(second, &input)?.marginal(read_second)?;
                let (k, diff) = out1
                    .probs()
                    .iter()
                    .zip(out2.probs())
                    .map(|(a, b)| (a - b).abs())
                    .enumerate()
                    .fold((0, 0.0f64), |best, (k, d)| if d > best.1 { (k, d) } else { best });
                Ok((diff, k, out1.probs()[k], out2.probs()[k]))
            })
            .collect::<Result<_, SimError>>()?;

        let mut worst: Option<(usize, (f64, usize, f64, f64))> = None;
        for (sample, entry) in per_sample.into_iter().enumerate() {
            if worst.as_ref().is_none_or(|(_, w)| entry.0 > w.0) {
                worst = Some((sample, entry));
            }
        }
        let max_discrepancy = worst.as_ref().map_or(0.0, |(_, w)| w.0);
        let equivalent = max_discrepancy <= self.options.tol;
        let witness = match worst {
            Some((sample, (_, k, p1, p2))) if !equivalent => Some(Witness {
                seed: self.options.seed,
                sample,
                bitstring: bits(k, read_first.len()),
                p_first: p1,
                p_second: p2,
            }),
            _ => None,
        };
        Ok(EquivalenceVerdict {
            equivalent,
            max_discrepancy,
            samples: self.options.samples,
            tol: self.options.tol,
            witness,
        })
    }
}

fn bits(k: usize, width: usize) -> String {
    (0..width)
        .map(|j| if k & (1 << (width - 1 - j)) != 0 { '1' } else { '0' })
        .collect()
}
