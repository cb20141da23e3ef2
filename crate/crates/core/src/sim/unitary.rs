//! Dense unitaries: named single-qubit gates and seeded Haar-random blocks.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::{BaseGate, Circuit};
use crate::seed;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A square complex matrix, row-major, acting on `log2(dim)` qubits with
/// the first qubit as the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    data: Vec<Complex64>,
}

impl Unitary {
    pub fn identity(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        Unitary { dim, data }
    }

    /// Row-major entries; `None` unless `entries.len()` is `4^k`.
    pub fn from_row_major(entries: Vec<Complex64>) -> Option<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() || !dim.is_power_of_two() {
            return None;
        }
        Some(Unitary { dim, data: entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim)
    }

    /// Max entry-wise deviation of `U†U` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let dot: Complex64 = (0..d).map(|k| self.get(k, i).conj() * self.get(k, j)).sum();
                let expected = if i == j { ONE } else { ZERO };
                worst = worst.max((dot - expected).norm());
            }
        }
        worst
    }

    /// Haar-distributed unitary: Gram–Schmidt on the columns of a complex
    /// Gaussian matrix.
    pub fn haar_random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Self {
        let d = 1usize << num_qubits;
        let mut cols: Vec<Vec<Complex64>> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            })
            .collect();
        for j in 0..d {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let basis = &done[k];
                let proj: Complex64 = basis.iter().zip(&rest[0]).map(|(b, v)| b.conj() * v).sum();
                for (v, b) in rest[0].iter_mut().zip(basis) {
                    *v -= proj * b;
                }
            }
            let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            for v in &mut cols[j] {
                *v /= norm;
            }
        }
        let mut data = vec![ZERO; d * d];
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                data[r * d + c] = *v;
            }
        }
        Unitary { dim: d, data }
    }
}

/// The 2×2 matrix of a named single-qubit gate, `[[m00, m01], [m10, m11]]`.
pub fn base_matrix(base: &BaseGate) -> [[Complex64; 2]; 2] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let phase = |theta: f64| Complex64::from_polar(1.0, theta);
    let s = FRAC_1_SQRT_2;
    match *base {
        BaseGate::H => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
        BaseGate::X => [[ZERO, ONE], [ONE, ZERO]],
        BaseGate::Y => [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]],
        BaseGate::Z => [[ONE, ZERO], [ZERO, c(-1.0, 0.0)]],
        BaseGate::S => [[ONE, ZERO], [ZERO, c(0.0, 1.0)]],
        BaseGate::Sdg => [[ONE, ZERO], [ZERO, c(0.0, -1.0)]],
        BaseGate::T => [[ONE, ZERO], [ZERO, phase(std::f64::consts::FRAC_PI_4)]],
        BaseGate::Tdg => [[ONE, ZERO], [ZERO, phase(-std::f64::consts::FRAC_PI_4)]],
        BaseGate::Rx(t) => {
            let (sn, cs) = (t / 2.0).sin_cos();
            [[c(cs, 0.0), c(0.0, -sn)], [c(0.0, -sn), c(cs, 0.0)]]
        }
        BaseGate::Ry(t) => {
            let (sn, cs) = (t / 2.0).sin_cos();
            [[c(cs, 0.0), c(-sn, 0.0)], [c(sn, 0.0), c(cs, 0.0)]]
        }
        BaseGate::Rz(t) => [[phase(-t / 2.0), ZERO], [ZERO, phase(t / 2.0)]],
        BaseGate::U3(theta, phi, lambda) => {
            let (sn, cs) = (theta / 2.0).sin_cos();
            [
                [c(cs, 0.0), -phase(lambda) * sn],
                [phase(phi) * sn, phase(phi + lambda) * cs],
            ]
        }
    }
}

/// Concrete unitaries for opaque labels.
#[derive(Debug, Clone, Default)]
pub struct OpaqueBindings {
    table: HashMap<String, Unitary>,
}

impl OpaqueBindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, label: impl Into<String>, unitary: Unitary) {
        self.table.insert(label.into(), unitary);
    }

    pub fn get(&self, label: &str) -> Option<&Unitary> {
        self.table.get(label)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// A Haar-random unitary for `label`, determined by `(seed, label, arity)`
    /// alone so that separately loaded circuits agree on it.
    pub fn haar_for(label: &str, arity: usize, seed: u64) -> Unitary {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(&[seed, seed::hash_str(label), arity as u64]));
        Unitary::haar_random(arity, &mut rng)
    }

    /// Binds every opaque label of `circuits` not already bound.
    pub fn bind_haar<'a>(&mut self, circuits: impl IntoIterator<Item = &'a Circuit>, seed: u64) {
        for circuit in circuits {
            for (label, arity) in circuit.opaque_blocks() {
                if !self.table.contains_key(&label) {
                    let u = Self::haar_for(&label, arity, seed);
                    self.table.insert(label, u);
                }
            }
        }
    }

    pub fn haar_for_circuits<'a>(circuits: impl IntoIterator<Item = &'a Circuit>, seed: u64) -> Self {
        let mut b = Self::new();
        b.bind_haar(circuits, seed);
        b
    }
}
