//! Dense statevectors and subsystem marginals.
//!
//! Basis convention: wire `q0` is the most significant bit of the basis
//! index, so `|10⟩` on two wires is index 2 and has `q0 = 1`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::unitary::{base_matrix, OpaqueBindings, Unitary};
use super::SimError;
use crate::circuit::{Circuit, GateKind, QubitId};

pub const DEFAULT_QUBIT_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

fn mask(n: usize, q: QubitId) -> usize {
    1 << (n - 1 - q.0)
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Statevector { n, amps }
    }

    /// Wraps raw amplitudes. The length must be a power of two and the norm
    /// 1 within `1e-12`.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(SimError::BadAmplitudes(format!("length {} is not a power of two", amps.len())));
        }
        let n = amps.len().trailing_zeros() as usize;
        let state = Statevector { n, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(SimError::BadAmplitudes(format!("squared norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// i.i.d. complex standard-normal components, normalized.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Statevector { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn apply_controlled_2x2(&mut self, m: &[[Complex64; 2]; 2], controls: usize, target: usize) {
        for i in 0..self.amps.len() {
            if i & target != 0 || i & controls != controls {
                continue;
            }
            let j = i | target;
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a + m[0][1] * b;
            self.amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        for i in 0..self.amps.len() {
            if i & a != 0 && i & b == 0 {
                self.amps.swap(i, i ^ a ^ b);
            }
        }
    }

    fn apply_block(&mut self, u: &Unitary, qubits: &[QubitId]) {
        let k = qubits.len();
        let masks: Vec<usize> = qubits.iter().map(|q| mask(self.n, *q)).collect();
        let all: usize = masks.iter().sum();
        let offsets: Vec<usize> = (0..1usize << k)
            .map(|s| {
                (0..k)
                    .filter(|j| s & (1 << (k - 1 - j)) != 0)
                    .map(|j| masks[j])
                    .sum()
            })
            .collect();
        let mut input = vec![Complex64::new(0.0, 0.0); offsets.len()];
        for base in 0..self.amps.len() {
            if base & all != 0 {
                continue;
            }
            for (slot, off) in input.iter_mut().zip(&offsets) {
                *slot = self.amps[base | off];
            }
            for (row, off) in u.rows().zip(&offsets) {
                self.amps[base | off] = row.iter().zip(&input).map(|(m, v)| m * v).sum();
            }
        }
    }

    /// Outcome distribution of the listed wires, in the listed order
    /// (`qubits[0]` is the leading bit of each outcome string).
    pub fn marginal(&self, qubits: &[QubitId]) -> Result<Distribution, SimError> {
        for (i, q) in qubits.iter().enumerate() {
            if q.0 >= self.n {
                return Err(SimError::QubitOutOfRange { qubit: *q, n: self.n });
            }
            if qubits[..i].contains(q) {
                return Err(SimError::DuplicateQubit(*q));
            }
        }
        let m = qubits.len();
        let masks: Vec<usize> = qubits.iter().map(|q| mask(self.n, *q)).collect();
        let mut probs = vec![0.0; 1 << m];
        for (i, a) in self.amps.iter().enumerate() {
            let k = masks
                .iter()
                .enumerate()
                .filter(|(_, msk)| i & **msk != 0)
                .fold(0usize, |k, (j, _)| k | (1 << (m - 1 - j)));
            probs[k] += a.norm_sqr();
        }
        Ok(Distribution {
            qubits: qubits.to_vec(),
            probs,
        })
    }
}

/// `random_state` with the default qubit limit.
pub fn random_state(n: usize, seed: u64) -> Result<Statevector, SimError> {
    if n > DEFAULT_QUBIT_LIMIT {
        return Err(SimError::QubitLimit {
            n,
            limit: DEFAULT_QUBIT_LIMIT,
        });
    }
    Ok(Statevector::random(n, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Probability table over outcome strings of an ordered wire subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    qubits: Vec<QubitId>,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }

    /// Probabilities indexed by outcome read as a binary number, first wire
    /// most significant.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of an outcome string such as `"01"`.
    pub fn probability(&self, bits: &str) -> Option<f64> {
        if bits.len() != self.qubits.len() {
            return None;
        }
        let mut k = 0usize;
        for ch in bits.chars() {
            k = (k << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => return None,
                };
        }
        self.probs.get(k).copied()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Renders outcome index `k` as a bit string over this distribution's wires.
    pub fn bitstring(&self, k: usize) -> String {
        let m = self.qubits.len();
        (0..m).map(|j| if k & (1 << (m - 1 - j)) != 0 { '1' } else { '0' }).collect()
    }
}

/// Applies circuits to statevectors.
#[derive(Debug, Clone)]
pub struct Simulator {
    bindings: OpaqueBindings,
    qubit_limit: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Simulator {
            bindings: OpaqueBindings::new(),
            qubit_limit: DEFAULT_QUBIT_LIMIT,
        }
    }
}

impl Simulator {
    pub fn new(bindings: OpaqueBindings) -> Self {
        Simulator {
            bindings,
            ..Self::default()
        }
    }

    pub fn with_qubit_limit(mut self, limit: usize) -> Self {
        self.qubit_limit = limit;
        self
    }

    pub fn qubit_limit(&self) -> usize {
        self.qubit_limit
    }

    pub fn bindings(&self) -> &OpaqueBindings {
        &self.bindings
    }

    pub fn check_size(&self, n: usize) -> Result<(), SimError> {
        if n > self.qubit_limit {
            Err(SimError::QubitLimit {
                n,
                limit: self.qubit_limit,
            })
        } else {
            Ok(())
        }
    }

    pub fn simulate(&self, circuit: &Circuit, input: &Statevector) -> Result<Statevector, SimError> {
        let n = circuit.num_qubits();
        self.check_size(n)?;
        if input.n != n {
            return Err(SimError::QubitCountMismatch(n, input.n));
        }
        let mut state = input.clone();
        for gate in circuit.gates() {
            match &gate.kind {
                GateKind::Single { base, qubit } => {
                    state.apply_controlled_2x2(&base_matrix(base), 0, mask(n, *qubit));
                }
                GateKind::Controlled {
                    base,
                    controls,
                    target,
                } => {
                    let cmask = controls.iter().map(|c| mask(n, *c)).sum();
                    state.apply_controlled_2x2(&base_matrix(base), cmask, mask(n, *target));
                }
                GateKind::Swap { a, b } => state.apply_swap(mask(n, *a), mask(n, *b)),
                GateKind::Opaque { label, qubits } => {
                    let u = self
                        .bindings
                        .get(label)
                        .ok_or_else(|| SimError::UnboundOpaque(label.clone()))?;
                    if u.num_qubits() != qubits.len() {
                        return Err(SimError::ArityMismatch {
                            label: label.clone(),
                            bound: u.num_qubits(),
                            used: qubits.len(),
                        });
                    }
                    state.apply_block(u, qubits);
                }
            }
        }
        Ok(state)
    }
}
