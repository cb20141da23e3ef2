//! Reader and writer for the on-disk circuit format: a line-oriented subset
//! of OpenQASM 2.0 plus a discard pragma.
//!
//! ```text
//! OPENQASM 2.0;
//! include "qelib1.inc";
//! opaque U3 a,b,c;
//! qreg q[3];
//! creg c[2];
//! U3 q[0],q[1],q[2];
//! cx q[1],q[0];
//! measure q[1] -> c[0];
//! measure q[2] -> c[1];
//! #pragma dge discard q[2]
//! ```
//!
//! One statement per line, `;`-terminated, `//` starts a comment. Gates are
//! the single-qubit mnemonics `h x y z s sdg t tdg rx ry rz u3`, any of them
//! prefixed by one `c` per control (`cx`, `ccz`, `crz(θ)`, `cu3(θ,φ,λ)`, …;
//! controls first, target last), `swap`, and applications of declared
//! `opaque` blocks. A `c…z` gate takes its highest-index operand as target.
//!
//! Measurements must follow every gate. A wire is dead when it is never
//! measured or is named by a `#pragma dge discard` line.

mod expr;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{BaseGate, Circuit, CircuitError, GateKind, OutcomeMap, QubitId};

/// Version tag of the text dialect, bumped on any grammar change.
pub const DIALECT_VERSION: &str = "dge-qasm/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Measure {
    pub qubit: QubitId,
    pub clbit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpaqueDecl {
    pub label: String,
    pub arity: usize,
}

/// A parsed program: the circuit (with its dead set) plus the measurement
/// statements and opaque declarations needed to write it back.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceCircuit {
    pub circuit: Circuit,
    pub measures: Vec<Measure>,
    pub opaques: Vec<OpaqueDecl>,
    pub clbits: usize,
}

impl SourceCircuit {
    /// Wraps a bare circuit, measuring every valid wire `i` into `c[i]` and
    /// declaring its opaque blocks.
    pub fn from_circuit(circuit: Circuit) -> Self {
        let measures = circuit
            .valid_qubits()
            .into_iter()
            .map(|q| Measure { qubit: q, clbit: q.0 })
            .collect::<Vec<_>>();
        let opaques = circuit
            .opaque_blocks()
            .into_iter()
            .map(|(label, arity)| OpaqueDecl { label, arity })
            .collect();
        let clbits = if measures.is_empty() { 0 } else { circuit.num_qubits() };
        SourceCircuit {
            circuit,
            measures,
            opaques,
            clbits,
        }
    }

    /// Same program with `circuit` in place of the current one (typically
    /// its optimized form).
    pub fn with_circuit(&self, circuit: Circuit) -> Self {
        SourceCircuit {
            circuit,
            ..self.clone()
        }
    }

    /// For each classical bit fed by a valid wire, that wire; sorted by bit.
    pub fn valid_readout(&self) -> Vec<(usize, QubitId)> {
        let mut out: Vec<(usize, QubitId)> = self
            .measures
            .iter()
            .filter(|m| !self.circuit.is_dead(m.qubit))
            .map(|m| (m.clbit, m.qubit))
            .collect();
        out.sort();
        out
    }

    /// Serializes with the circuit's own outcome map.
    pub fn to_qasm(&self) -> String {
        serialize(self, self.circuit.outcome_map())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("missing `OPENQASM 2.0;` header")]
    MissingHeader,
    #[error("unsupported statement: {0}")]
    Unsupported(String),
    #[error("only a single qreg and a single creg are supported")]
    MultipleRegisters,
    #[error("no qreg declared")]
    MissingQreg,
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("`{name}` expects {expected} {what}, got {got}")]
    Arity {
        name: String,
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("gate after measurement (mid-circuit measurement is not supported)")]
    MidCircuitMeasure,
    #[error("bad angle: {0}")]
    Angle(String),
    #[error("index {index} out of range for register `{register}` of size {size}")]
    IndexOutOfRange { register: String, index: usize, size: usize },
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("{0} measured more than once")]
    DuplicateMeasure(String),
    #[error("opaque `{0}` declared twice or shadows a built-in gate")]
    BadOpaque(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

struct Register {
    name: String,
    size: usize,
}

#[derive(Default)]
struct Reader {
    header: bool,
    qreg: Option<Register>,
    creg: Option<Register>,
    opaques: Vec<OpaqueDecl>,
    gates: Vec<GateKind>,
    measures: Vec<Measure>,
    discarded: BTreeSet<QubitId>,
}

fn syntax(msg: impl Into<String>) -> ParseErrorKind {
    ParseErrorKind::Syntax(msg.into())
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Resolves a built-in mnemonic into (base gate name, number of controls).
fn builtin(name: &str) -> Option<(&str, usize)> {
    let stripped = name.trim_start_matches('c');
    let controls = name.len() - stripped.len();
    BaseGate::arity_of(stripped).map(|_| (stripped, controls))
}

fn is_builtin(name: &str) -> bool {
    name == "swap" || builtin(name).is_some()
}

/// Parses `name[index]` against `reg`.
fn parse_indexed(text: &str, reg: &Register) -> Result<usize, ParseErrorKind> {
    let text = text.trim();
    let (name, rest) = text
        .split_once('[')
        .ok_or_else(|| syntax(format!("expected `{}[i]`, got `{text}`", reg.name)))?;
    let index = rest
        .strip_suffix(']')
        .ok_or_else(|| syntax(format!("missing `]` in `{text}`")))?;
    let name = name.trim();
    if name != reg.name {
        return Err(ParseErrorKind::UnknownRegister(name.to_string()));
    }
    let index: usize = index
        .trim()
        .parse()
        .map_err(|_| syntax(format!("bad index in `{text}`")))?;
    if index >= reg.size {
        return Err(ParseErrorKind::IndexOutOfRange {
            register: reg.name.clone(),
            index,
            size: reg.size,
        });
    }
    Ok(index)
}

fn parse_register_decl(rest: &str) -> Result<Register, ParseErrorKind> {
    let rest = rest.trim();
    let (name, size) = rest
        .split_once('[')
        .ok_or_else(|| syntax(format!("bad register declaration `{rest}`")))?;
    let size = size
        .strip_suffix(']')
        .and_then(|s| s.trim().parse::<usize>().ok())
        .ok_or_else(|| syntax(format!("bad register size in `{rest}`")))?;
    let name = name.trim();
    if !is_ident(name) {
        return Err(syntax(format!("bad register name `{name}`")));
    }
    Ok(Register {
        name: name.to_string(),
        size,
    })
}

/// Splits `name(params) operands` into its three parts.
fn split_application(body: &str) -> Result<(&str, Option<&str>, &str), ParseErrorKind> {
    let name_end = body
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .unwrap_or(body.len());
    let name = &body[..name_end];
    let rest = body[name_end..].trim_start();
    if let Some(after_open) = rest.strip_prefix('(') {
        let close = after_open
            .rfind(')')
            .ok_or_else(|| syntax(format!("missing `)` in `{body}`")))?;
        Ok((name, Some(&after_open[..close]), after_open[close + 1..].trim()))
    } else {
        Ok((name, None, rest))
    }
}

impl Reader {
    fn qreg(&self) -> Result<&Register, ParseErrorKind> {
        self.qreg.as_ref().ok_or(ParseErrorKind::MissingQreg)
    }

    fn statement(&mut self, body: &str) -> Result<(), ParseErrorKind> {
        if !self.header {
            let version = body.strip_prefix("OPENQASM").map(str::trim);
            return match version {
                Some("2.0") => {
                    self.header = true;
                    Ok(())
                }
                Some(v) => Err(ParseErrorKind::Unsupported(format!("OPENQASM version `{v}`"))),
                None => Err(ParseErrorKind::MissingHeader),
            };
        }
        let keyword = body.split(|c: char| c.is_whitespace() || c == '(').next().unwrap_or("");
        let rest = body[keyword.len()..].trim();
        match keyword {
            "OPENQASM" => Err(syntax("duplicate header")),
            "include" => {
                if rest == "\"qelib1.inc\"" {
                    Ok(())
                } else {
                    Err(ParseErrorKind::Unsupported(format!("include {rest}")))
                }
            }
            "qreg" => {
                if self.qreg.is_some() {
                    return Err(ParseErrorKind::MultipleRegisters);
                }
                self.qreg = Some(parse_register_decl(rest)?);
                Ok(())
            }
            "creg" => {
                if self.creg.is_some() {
                    return Err(ParseErrorKind::MultipleRegisters);
                }
                self.creg = Some(parse_register_decl(rest)?);
                Ok(())
            }
            "opaque" => self.opaque_decl(rest),
            "measure" => self.measure(rest),
            "gate" | "barrier" | "reset" | "if" | "U" | "CX" => Err(ParseErrorKind::Unsupported(keyword.to_string())),
            _ => self.application(body),
        }
    }

    fn opaque_decl(&mut self, rest: &str) -> Result<(), ParseErrorKind> {
        let (label, params, args) = split_application(rest)?;
        if params.is_some() {
            return Err(ParseErrorKind::Unsupported("parameterized opaque".into()));
        }
        if !is_ident(label) {
            return Err(syntax(format!("bad opaque name `{label}`")));
        }
        if is_builtin(label) || matches!(label, "U" | "CX") || self.opaques.iter().any(|o| o.label == label) {
            return Err(ParseErrorKind::BadOpaque(label.to_string()));
        }
        let formals: Vec<&str> = args.split(',').map(str::trim).collect();
        if formals.iter().any(|f| !is_ident(f)) {
            return Err(syntax(format!("bad argument list `{args}`")));
        }
        self.opaques.push(OpaqueDecl {
            label: label.to_string(),
            arity: formals.len(),
        });
        Ok(())
    }

    fn measure(&mut self, rest: &str) -> Result<(), ParseErrorKind> {
        let (src, dst) = rest
            .split_once("->")
            .ok_or_else(|| syntax("expected `measure q[i] -> c[j]`"))?;
        let qubit = QubitId(parse_indexed(src, self.qreg()?)?);
        let creg = self.creg.as_ref().ok_or(ParseErrorKind::UnknownRegister("creg".into()))?;
        let clbit = parse_indexed(dst, creg)?;
        if self.measures.iter().any(|m| m.clbit == clbit) {
            return Err(ParseErrorKind::DuplicateMeasure(format!("{}[{clbit}]", creg.name)));
        }
        if self.measures.iter().any(|m| m.qubit == qubit) {
            return Err(ParseErrorKind::DuplicateMeasure(qubit.to_string()));
        }
        self.measures.push(Measure { qubit, clbit });
        Ok(())
    }

    fn application(&mut self, body: &str) -> Result<(), ParseErrorKind> {
        let (name, params, operands) = split_application(body)?;
        if name.is_empty() {
            return Err(syntax(format!("cannot parse `{body}`")));
        }
        if !self.measures.is_empty() {
            return Err(ParseErrorKind::MidCircuitMeasure);
        }
        let reg = self.qreg()?;
        let qubits: Vec<usize> = operands
            .split(',')
            .map(|op| parse_indexed(op, reg))
            .collect::<Result<_, _>>()?;
        let params: Vec<f64> = match params {
            None => Vec::new(),
            Some(p) if p.trim().is_empty() => Vec::new(),
            Some(p) => p
                .split(',')
                .map(|e| expr::eval(e).map_err(ParseErrorKind::Angle))
                .collect::<Result<_, _>>()?,
        };
        let expect = |what: &'static str, expected: usize, got: usize| {
            if expected == got {
                Ok(())
            } else {
                Err(ParseErrorKind::Arity {
                    name: name.to_string(),
                    what,
                    expected,
                    got,
                })
            }
        };

        let kind = if let Some(decl) = self.opaques.iter().find(|o| o.label == name) {
            expect("parameters", 0, params.len())?;
            expect("qubits", decl.arity, qubits.len())?;
            GateKind::opaque(name, &qubits)
        } else if name == "swap" {
            expect("parameters", 0, params.len())?;
            expect("qubits", 2, qubits.len())?;
            GateKind::swap(qubits[0], qubits[1])
        } else if let Some((base_name, controls)) = builtin(name) {
            let arity = BaseGate::arity_of(base_name).unwrap_or(0);
            expect("parameters", arity, params.len())?;
            expect("qubits", controls + 1, qubits.len())?;
            let base = BaseGate::from_name(base_name, &params).expect("arity checked");
            if controls == 0 {
                GateKind::single(base, qubits[0])
            } else {
                GateKind::controlled(base, &qubits[..controls], qubits[controls])
            }
        } else {
            return Err(ParseErrorKind::UnknownGate(name.to_string()));
        };
        self.gates.push(kind);
        Ok(())
    }

    fn pragma(&mut self, line: &str) -> Result<(), ParseErrorKind> {
        let body = line.trim_end_matches(';').trim();
        let mut words = body.split_whitespace();
        match (words.next(), words.next(), words.next()) {
            (Some("#pragma"), Some("dge"), Some("discard")) => {}
            _ => return Err(ParseErrorKind::Unsupported(format!("pragma `{body}`"))),
        }
        let operand: String = words.collect::<Vec<_>>().join("");
        let q = parse_indexed(&operand, self.qreg()?)?;
        self.discarded.insert(QubitId(q));
        Ok(())
    }

    fn finish(self) -> Result<SourceCircuit, ParseErrorKind> {
        let qreg = self.qreg.ok_or(ParseErrorKind::MissingQreg)?;
        let n = qreg.size;
        let measured: BTreeSet<QubitId> = self.measures.iter().map(|m| m.qubit).collect();
        let dead = (0..n)
            .map(QubitId)
            .filter(|q| !measured.contains(q) || self.discarded.contains(q));
        let circuit = Circuit::new(n, self.gates, dead)?;
        Ok(SourceCircuit {
            circuit,
            measures: self.measures,
            opaques: self.opaques,
            clbits: self.creg.map_or(0, |c| c.size),
        })
    }
}

/// Parses a program in the dialect described in the module docs.
pub fn parse(text: &str) -> Result<SourceCircuit, ParseError> {
    let mut reader = Reader::default();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let at = |kind| ParseError { line: line_no, kind };
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if !reader.header {
                return Err(at(ParseErrorKind::MissingHeader));
            }
            reader.pragma(line).map_err(at)?;
            continue;
        }
        let Some((body, tail)) = line.split_once(';') else {
            return Err(at(syntax("missing `;`")));
        };
        if !tail.trim().is_empty() {
            return Err(at(syntax("one statement per line")));
        }
        reader.statement(body.trim()).map_err(at)?;
    }
    if !reader.header {
        return Err(ParseError {
            line: last_line.max(1),
            kind: ParseErrorKind::MissingHeader,
        });
    }
    reader.finish().map_err(|kind| ParseError {
        line: last_line.max(1),
        kind,
    })
}

struct Program<'a> {
    source: &'a SourceCircuit,
    map: &'a OutcomeMap,
}

impl fmt::Display for Program<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sc = self.source;
        writeln!(f, "OPENQASM 2.0;")?;
        writeln!(f, "include \"qelib1.inc\";")?;
        for decl in &sc.opaques {
            let formals: Vec<String> = (0..decl.arity).map(|i| format!("a{i}")).collect();
            writeln!(f, "opaque {} {};", decl.label, formals.join(","))?;
        }
        writeln!(f, "qreg q[{}];", sc.circuit.num_qubits())?;
        if sc.clbits > 0 {
            writeln!(f, "creg c[{}];", sc.clbits)?;
        }
        for gate in sc.circuit.gates() {
            writeln!(f, "{};", gate.kind)?;
        }
        let mut measured = BTreeSet::new();
        for m in &sc.measures {
            let wire = self.map.wire_of(m.qubit);
            measured.insert(wire);
            writeln!(f, "measure {wire} -> c[{}];", m.clbit)?;
        }
        for q in sc.circuit.dead().iter().filter(|q| measured.contains(q)) {
            writeln!(f, "#pragma dge discard {q}")?;
        }
        Ok(())
    }
}

/// Writes the program, redirecting each `measure q[i]` to `q[map(i)]` and
/// emitting discard pragmas for measured dead wires.
pub fn serialize(source: &SourceCircuit, map: &OutcomeMap) -> String {
    let mut out = String::new();
    write!(out, "{}", Program { source, map }).expect("writing to a String cannot fail");
    out
}
