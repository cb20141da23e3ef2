//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered gate list over `n` wires. Program order is the
//! canonical representation: the dependency DAG is never stored as explicit
//! edges, it is implied by the per-wire gate sequences kept alongside the
//! gate table. Gate ids are assigned in program order at construction and are
//! never reused, so a gate keeps its id through any sequence of removals.
//!
//! The circuit also owns its dead set (wires whose measurement outcome is
//! discarded) and the [`OutcomeMap`] that records which wire carries each
//! measurement label after SWAP removals have permuted them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a wire, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitId(pub usize);

impl QubitId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q[{}]", self.0)
    }
}

impl From<usize> for QubitId {
    fn from(index: usize) -> Self {
        QubitId(index)
    }
}

/// Stable identifier of a gate within one circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GateId(pub usize);

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// A named single-qubit operation. Rotation angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BaseGate {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    U3(f64, f64, f64),
}

impl BaseGate {
    /// The Clifford+T single-qubit palette.
    pub const CLIFFORD_T: [BaseGate; 8] = [
        BaseGate::H,
        BaseGate::X,
        BaseGate::Y,
        BaseGate::Z,
        BaseGate::S,
        BaseGate::Sdg,
        BaseGate::T,
        BaseGate::Tdg,
    ];

    /// Lower-case mnemonic used by the text dialect.
    pub fn name(&self) -> &'static str {
        match self {
            BaseGate::H => "h",
            BaseGate::X => "x",
            BaseGate::Y => "y",
            BaseGate::Z => "z",
            BaseGate::S => "s",
            BaseGate::Sdg => "sdg",
            BaseGate::T => "t",
            BaseGate::Tdg => "tdg",
            BaseGate::Rx(_) => "rx",
            BaseGate::Ry(_) => "ry",
            BaseGate::Rz(_) => "rz",
            BaseGate::U3(..) => "u3",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            BaseGate::Rx(t) | BaseGate::Ry(t) | BaseGate::Rz(t) => vec![t],
            BaseGate::U3(t, p, l) => vec![t, p, l],
            _ => Vec::new(),
        }
    }

    /// Number of angle parameters the mnemonic `name` takes, or `None` if the
    /// name is not a known single-qubit operation.
    pub fn arity_of(name: &str) -> Option<usize> {
        match name {
            "h" | "x" | "y" | "z" | "s" | "sdg" | "t" | "tdg" => Some(0),
            "rx" | "ry" | "rz" => Some(1),
            "u3" => Some(3),
            _ => None,
        }
    }

    /// Builds a base gate from its mnemonic and parameter list.
    pub fn from_name(name: &str, params: &[f64]) -> Option<BaseGate> {
        let expected = Self::arity_of(name)?;
        if params.len() != expected {
            return None;
        }
        Some(match name {
            "h" => BaseGate::H,
            "x" => BaseGate::X,
            "y" => BaseGate::Y,
            "z" => BaseGate::Z,
            "s" => BaseGate::S,
            "sdg" => BaseGate::Sdg,
            "t" => BaseGate::T,
            "tdg" => BaseGate::Tdg,
            "rx" => BaseGate::Rx(params[0]),
            "ry" => BaseGate::Ry(params[0]),
            "rz" => BaseGate::Rz(params[0]),
            "u3" => BaseGate::U3(params[0], params[1], params[2]),
            _ => unreachable!(),
        })
    }

    pub fn is_parameterized(&self) -> bool {
        matches!(self, BaseGate::Rx(_) | BaseGate::Ry(_) | BaseGate::Rz(_) | BaseGate::U3(..))
    }
}

/// Formats an angle with 17 significant digits, enough for a lossless
/// `f64` round trip.
pub(crate) fn format_angle(angle: f64) -> String {
    format!("{angle:.16e}")
}

fn write_base(f: &mut fmt::Formatter<'_>, prefix: &str, base: &BaseGate) -> fmt::Result {
    write!(f, "{prefix}{}", base.name())?;
    let params = base.params();
    if !params.is_empty() {
        let rendered: Vec<String> = params.into_iter().map(format_angle).collect();
        write!(f, "({})", rendered.join(","))?;
    }
    Ok(())
}

fn write_operands(f: &mut fmt::Formatter<'_>, qubits: &[QubitId]) -> fmt::Result {
    for (i, q) in qubits.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{q}")?;
    }
    Ok(())
}

/// What a gate does and which wires it acts on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    Single {
        base: BaseGate,
        qubit: QubitId,
    },
    /// `base` applied to `target` when every control is |1⟩.
    Controlled {
        base: BaseGate,
        controls: Vec<QubitId>,
        target: QubitId,
    },
    Swap {
        a: QubitId,
        b: QubitId,
    },
    /// An uninterpreted block. The simulator needs a unitary bound to the
    /// label; the optimizer never looks inside.
    Opaque {
        label: String,
        qubits: Vec<QubitId>,
    },
}

impl GateKind {
    pub fn single(base: BaseGate, qubit: usize) -> Self {
        GateKind::Single {
            base,
            qubit: QubitId(qubit),
        }
    }

    pub fn controlled(base: BaseGate, controls: &[usize], target: usize) -> Self {
        GateKind::Controlled {
            base,
            controls: controls.iter().copied().map(QubitId).collect(),
            target: QubitId(target),
        }
        .canonical()
    }

    pub fn h(qubit: usize) -> Self {
        Self::single(BaseGate::H, qubit)
    }

    pub fn x(qubit: usize) -> Self {
        Self::single(BaseGate::X, qubit)
    }

    pub fn z(qubit: usize) -> Self {
        Self::single(BaseGate::Z, qubit)
    }

    pub fn rz(theta: f64, qubit: usize) -> Self {
        Self::single(BaseGate::Rz(theta), qubit)
    }

    pub fn ry(theta: f64, qubit: usize) -> Self {
        Self::single(BaseGate::Ry(theta), qubit)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::controlled(BaseGate::X, &[control], target)
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::controlled(BaseGate::Z, &[a], b)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        GateKind::Swap {
            a: QubitId(a),
            b: QubitId(b),
        }
    }

    pub fn opaque(label: impl Into<String>, qubits: &[usize]) -> Self {
        GateKind::Opaque {
            label: label.into(),
            qubits: qubits.iter().copied().map(QubitId).collect(),
        }
    }

    /// Every wire the gate touches. Controlled gates list controls first,
    /// then the target.
    pub fn qubits(&self) -> Vec<QubitId> {
        match self {
            GateKind::Single { qubit, .. } => vec![*qubit],
            GateKind::Controlled {
                controls, target, ..
            } => controls.iter().copied().chain(Some(*target)).collect(),
            GateKind::Swap { a, b } => vec![*a, *b],
            GateKind::Opaque { qubits, .. } => qubits.clone(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::Single { .. } => 1,
            GateKind::Controlled { controls, .. } => controls.len() + 1,
            GateKind::Swap { .. } => 2,
            GateKind::Opaque { qubits, .. } => qubits.len(),
        }
    }

    /// Controlled-Z is symmetric in its wires; it is stored with the
    /// highest-index wire as target so that reports are deterministic.
    pub fn canonical(self) -> Self {
        match self {
            GateKind::Controlled {
                base: BaseGate::Z,
                controls,
                target,
            } => {
                let mut all: Vec<QubitId> = controls.iter().copied().chain(Some(target)).collect();
                let Some((pos, &highest)) = all.iter().enumerate().max_by_key(|(_, q)| **q) else {
                    unreachable!()
                };
                if highest == target {
                    return GateKind::Controlled {
                        base: BaseGate::Z,
                        controls,
                        target,
                    };
                }
                all.remove(pos);
                GateKind::Controlled {
                    base: BaseGate::Z,
                    controls: all,
                    target: highest,
                }
            }
            other => other,
        }
    }

    fn validate(&self, n: usize) -> Result<(), CircuitError> {
        match self {
            GateKind::Controlled { controls, .. } if controls.is_empty() => {
                return Err(CircuitError::NoControls);
            }
            GateKind::Opaque { qubits, label } if qubits.is_empty() => {
                return Err(CircuitError::EmptyOpaque(label.clone()));
            }
            GateKind::Opaque { label, .. } if label.is_empty() => {
                return Err(CircuitError::EmptyOpaque(label.clone()));
            }
            _ => {}
        }
        let qubits = self.qubits();
        for (i, q) in qubits.iter().enumerate() {
            if q.0 >= n {
                return Err(CircuitError::QubitOutOfRange { qubit: *q, n });
            }
            if qubits[..i].contains(q) {
                return Err(CircuitError::DuplicateQubit(*q));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Single { base, qubit } => {
                write_base(f, "", base)?;
                write!(f, " {qubit}")
            }
            GateKind::Controlled {
                base,
                controls,
                target,
            } => {
                write_base(f, &"c".repeat(controls.len()), base)?;
                f.write_str(" ")?;
                write_operands(f, controls)?;
                write!(f, ",{target}")
            }
            GateKind::Swap { a, b } => write!(f, "swap {a},{b}"),
            GateKind::Opaque { label, qubits } => {
                write!(f, "{label} ")?;
                write_operands(f, qubits)
            }
        }
    }
}

/// One circuit element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub id: GateId,
    pub kind: GateKind,
}

/// For each measurement label (the wire it was measured on originally), the
/// wire that now carries that outcome. Always a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeMap(Vec<QubitId>);

impl OutcomeMap {
    pub fn identity(n: usize) -> Self {
        OutcomeMap((0..n).map(QubitId).collect())
    }

    /// Builds a map from explicit entries, checking it is a permutation.
    pub fn from_wires(wires: Vec<QubitId>) -> Result<Self, CircuitError> {
        let mut seen = vec![false; wires.len()];
        for w in &wires {
            if w.0 >= wires.len() || seen[w.0] {
                return Err(CircuitError::NotAPermutation);
            }
            seen[w.0] = true;
        }
        Ok(OutcomeMap(wires))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn wire_of(&self, label: QubitId) -> QubitId {
        self.0[label.0]
    }

    pub fn label_of(&self, wire: QubitId) -> QubitId {
        let pos = self.0.iter().position(|w| *w == wire).expect("permutation");
        QubitId(pos)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, w)| w.0 == i)
    }

    pub fn as_slice(&self) -> &[QubitId] {
        &self.0
    }

    /// Composes the map with the wire transposition `(a b)`: whatever label
    /// was read from `a` is now read from `b`, and vice versa.
    pub fn transpose_wires(&mut self, a: QubitId, b: QubitId) {
        for w in &mut self.0 {
            if *w == a {
                *w = b;
            } else if *w == b {
                *w = a;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for a {n}-qubit circuit")]
    QubitOutOfRange { qubit: QubitId, n: usize },
    #[error("qubit {0} appears more than once in one gate")]
    DuplicateQubit(QubitId),
    #[error("controlled gate without controls")]
    NoControls,
    #[error("opaque block `{0}` must have a label and act on at least one qubit")]
    EmptyOpaque(String),
    #[error("unknown gate id {0}")]
    UnknownGate(GateId),
    #[error("outcome map is not a permutation")]
    NotAPermutation,
}

/// An ordered gate list over `n` wires, with its dead set and outcome map.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    /// Indexed by gate id; `None` once removed.
    slots: Vec<Option<Gate>>,
    /// Per-wire gate ids in program order.
    wires: Vec<Vec<GateId>>,
    live: usize,
    dead: BTreeSet<QubitId>,
    outcome_map: OutcomeMap,
}

impl Circuit {
    /// Builds a circuit; gate ids are assigned 0, 1, 2, … in input order.
    pub fn new(
        n: usize,
        gates: impl IntoIterator<Item = GateKind>,
        dead: impl IntoIterator<Item = QubitId>,
    ) -> Result<Self, CircuitError> {
        let mut circuit = Circuit {
            n,
            slots: Vec::new(),
            wires: vec![Vec::new(); n],
            live: 0,
            dead: BTreeSet::new(),
            outcome_map: OutcomeMap::identity(n),
        };
        circuit.set_dead(dead)?;
        for kind in gates {
            circuit.push(kind)?;
        }
        Ok(circuit)
    }

    pub fn empty(n: usize) -> Self {
        Circuit::new(n, [], []).expect("empty circuit is valid")
    }

    /// Appends a gate at the end of program order and returns its id.
    pub fn push(&mut self, kind: GateKind) -> Result<GateId, CircuitError> {
        let kind = kind.canonical();
        kind.validate(self.n)?;
        let id = GateId(self.slots.len());
        for q in kind.qubits() {
            self.wires[q.0].push(id);
        }
        self.slots.push(Some(Gate { id, kind }));
        self.live += 1;
        Ok(id)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Number of gates currently in the circuit.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Gates in program order.
    pub fn gates(&self) -> impl Iterator<Item = &Gate> + '_ {
        self.slots.iter().flatten()
    }

    pub fn gate(&self, id: GateId) -> Option<&Gate> {
        self.slots.get(id.0).and_then(Option::as_ref)
    }

    pub fn contains(&self, id: GateId) -> bool {
        self.gate(id).is_some()
    }

    pub fn gate_ids(&self) -> Vec<GateId> {
        self.gates().map(|g| g.id).collect()
    }

    pub fn dead(&self) -> &BTreeSet<QubitId> {
        &self.dead
    }

    pub fn is_dead(&self, q: QubitId) -> bool {
        self.dead.contains(&q)
    }

    /// Wires not in the dead set, ascending.
    pub fn valid_qubits(&self) -> Vec<QubitId> {
        (0..self.n).map(QubitId).filter(|q| !self.dead.contains(q)).collect()
    }

    pub fn set_dead(&mut self, dead: impl IntoIterator<Item = QubitId>) -> Result<(), CircuitError> {
        let dead: BTreeSet<QubitId> = dead.into_iter().collect();
        if let Some(q) = dead.iter().find(|q| q.0 >= self.n) {
            return Err(CircuitError::QubitOutOfRange { qubit: *q, n: self.n });
        }
        self.dead = dead;
        Ok(())
    }

    pub fn with_dead(&self, dead: impl IntoIterator<Item = QubitId>) -> Result<Self, CircuitError> {
        let mut c = self.clone();
        c.set_dead(dead)?;
        Ok(c)
    }

    pub fn outcome_map(&self) -> &OutcomeMap {
        &self.outcome_map
    }

    pub fn set_outcome_map(&mut self, map: OutcomeMap) -> Result<(), CircuitError> {
        if map.len() != self.n {
            return Err(CircuitError::NotAPermutation);
        }
        self.outcome_map = map;
        Ok(())
    }

    /// Swaps the dead/valid status of wires `a` and `b` and composes the
    /// outcome map with the same transposition.
    pub(crate) fn relabel_wires(&mut self, a: QubitId, b: QubitId) {
        let a_dead = self.dead.remove(&a);
        let b_dead = self.dead.remove(&b);
        if a_dead {
            self.dead.insert(b);
        }
        if b_dead {
            self.dead.insert(a);
        }
        self.outcome_map.transpose_wires(a, b);
    }

    fn check_qubit(&self, q: QubitId) -> Result<(), CircuitError> {
        if q.0 >= self.n {
            Err(CircuitError::QubitOutOfRange { qubit: q, n: self.n })
        } else {
            Ok(())
        }
    }

    /// The program-latest gate touching `q`.
    pub fn last_gate_on_wire(&self, q: QubitId) -> Result<Option<GateId>, CircuitError> {
        self.check_qubit(q)?;
        Ok(self.wires[q.0].last().copied())
    }

    /// Gate ids on wire `q`, in program order.
    pub fn wire(&self, q: QubitId) -> Result<&[GateId], CircuitError> {
        self.check_qubit(q)?;
        Ok(&self.wires[q.0])
    }

    /// Whether `id` is the last gate on every wire it touches.
    pub fn in_frontier(&self, id: GateId) -> bool {
        match self.gate(id) {
            Some(g) => g
                .kind
                .qubits()
                .iter()
                .all(|q| self.wires[q.0].last() == Some(&id)),
            None => false,
        }
    }

    /// Gates none of whose output wires feed another gate, ascending by id.
    pub fn frontier(&self) -> Vec<GateId> {
        let mut candidates: Vec<GateId> = self.wires.iter().filter_map(|w| w.last().copied()).collect();
        candidates.sort_unstable();
        candidates.dedup();
        candidates.retain(|id| self.in_frontier(*id));
        candidates
    }

    /// Removes a gate in place, keeping the relative order of the others.
    /// Dead set and outcome map are untouched.
    pub fn remove_gate(&mut self, id: GateId) -> Result<Gate, CircuitError> {
        let gate = self
            .slots
            .get_mut(id.0)
            .and_then(Option::take)
            .ok_or(CircuitError::UnknownGate(id))?;
        for q in gate.kind.qubits() {
            let wire = &mut self.wires[q.0];
            if wire.last() == Some(&id) {
                wire.pop();
            } else if let Some(pos) = wire.iter().position(|g| *g == id) {
                wire.remove(pos);
            }
        }
        self.live -= 1;
        Ok(gate)
    }

    /// `self - g`: a copy with gate `id` removed.
    pub fn without(&self, id: GateId) -> Result<Circuit, CircuitError> {
        let mut c = self.clone();
        c.remove_gate(id)?;
        Ok(c)
    }

    /// Distinct opaque labels with their arity, in order of first use.
    pub fn opaque_blocks(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for g in self.gates() {
            if let GateKind::Opaque { label, qubits } = &g.kind {
                if !out.iter().any(|(l, _)| l == label) {
                    out.push((label.clone(), qubits.len()));
                }
            }
        }
        out
    }
}
