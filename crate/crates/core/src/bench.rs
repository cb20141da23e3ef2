//! Random-circuit benchmark: hybrid programs made of independently generated
//! circuit blocks, each preceded by a classical block that declares which
//! outcomes it discards.
//!
//! Every block draws its circuit and its dead set from its own seed, derived
//! from `(seed, width, program, block)`, so the same circuits appear under
//! every dead mode and results never depend on scheduling. Dead qubits are a
//! prefix of a seeded permutation, hence the dead set for a smaller count is
//! always a subset of the one for a larger count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{BaseGate, Circuit, GateKind, QubitId};
use crate::pass::{eliminate_dead_gates, PassConfig};
use crate::seed;
use crate::sim::{EquivalenceOptions, OpaqueBindings, Verifier};

/// Exact header of the summary CSV.
pub const CSV_HEADER: [&str; 7] = ["width", "dead_mode", "mean_removed", "mean_micros", "programs", "blocks", "seed"];

/// Widths up to this size are eligible for oracle spot checks.
pub const VERIFY_MAX_WIDTH: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("width {0} is too small; need at least 2 qubits")]
    WidthTooSmall(usize),
    #[error("dead mode {mode} leaves no valid qubit at width {width}")]
    DeadCount { mode: DeadMode, width: usize },
    #[error("{0}")]
    Config(String),
    #[error("bad dead mode `{0}`; expected fixed:K or pct:P")]
    BadDeadMode(String),
    #[error("spot check failed at width {width}, {mode}, program {program}, block {block}: discrepancy {discrepancy:e}")]
    Verification {
        width: usize,
        mode: DeadMode,
        program: usize,
        block: usize,
        discrepancy: f64,
    },
    #[error("oracle error: {0}")]
    Oracle(String),
    #[error("could not write output: {0}")]
    Io(String),
}

/// How many qubits of each block are discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeadMode {
    Fixed(usize),
    Percent(usize),
}

impl DeadMode {
    /// The number of dead qubits at width `w`.
    pub fn count(self, w: usize) -> Result<usize, BenchError> {
        let k = match self {
            DeadMode::Fixed(k) => k,
            DeadMode::Percent(p) => (p * w / 100).max(1),
        };
        if k == 0 || k >= w {
            return Err(BenchError::DeadCount { mode: self, width: w });
        }
        Ok(k)
    }
}

impl fmt::Display for DeadMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeadMode::Fixed(k) => write!(f, "fixed:{k}"),
            DeadMode::Percent(p) => write!(f, "pct:{p}"),
        }
    }
}

impl FromStr for DeadMode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BenchError::BadDeadMode(s.to_string());
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        let value: usize = value.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "fixed" if value >= 1 => Ok(DeadMode::Fixed(value)),
            "pct" | "percent" if (1..100).contains(&value) => Ok(DeadMode::Percent(value)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub widths: Vec<usize>,
    pub dead_modes: Vec<DeadMode>,
    /// Gates per circuit = `gate_multiplier × width`.
    pub gate_multiplier: usize,
    pub single_qubit_fraction: f64,
    /// Circuit blocks per hybrid program.
    pub blocks: usize,
    pub programs: usize,
    pub seed: u64,
    /// Include SWAP in the two-qubit palette.
    pub swap: bool,
    /// Fraction of blocks with width ≤ 10 checked against the oracle.
    pub verify_fraction: f64,
    pub verify_samples: usize,
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            widths: (2..=40).step_by(2).collect(),
            dead_modes: vec![DeadMode::Fixed(1)],
            gate_multiplier: 100,
            single_qubit_fraction: 0.1,
            blocks: 10,
            programs: 20,
            seed: 0,
            swap: true,
            verify_fraction: 0.05,
            verify_samples: 20,
            parallel: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.widths.is_empty() {
            return Err(BenchError::Config("no widths given".into()));
        }
        if self.dead_modes.is_empty() {
            return Err(BenchError::Config("no dead modes given".into()));
        }
        if !(self.single_qubit_fraction > 0.0 && self.single_qubit_fraction < 1.0) {
            return Err(BenchError::Config(format!(
                "single-qubit fraction {} is not in (0, 1)",
                self.single_qubit_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.verify_fraction) {
            return Err(BenchError::Config(format!("verify fraction {} is not in [0, 1]", self.verify_fraction)));
        }
        if self.blocks == 0 || self.programs == 0 {
            return Err(BenchError::Config("programs and blocks must be positive".into()));
        }
        for &w in &self.widths {
            if w < 2 {
                return Err(BenchError::WidthTooSmall(w));
            }
            for &mode in &self.dead_modes {
                mode.count(w)?;
            }
        }
        Ok(())
    }
}

/// Draws a circuit of `gates` gates on `w` qubits. Each gate is single-qubit
/// with probability `fraction_1q` (Clifford+T base, uniform qubit), otherwise
/// CX, CZ or SWAP (uniform; SWAP only when `swap` is set) on a uniform
/// ordered pair of distinct qubits.
pub fn random_circuit<R: Rng + ?Sized>(
    w: usize,
    gates: usize,
    fraction_1q: f64,
    swap: bool,
    rng: &mut R,
) -> Result<Circuit, BenchError> {
    if w < 2 && gates > 0 && fraction_1q < 1.0 {
        return Err(BenchError::WidthTooSmall(w));
    }
    let palette = if swap { 3 } else { 2 };
    let mut circuit = Circuit::empty(w);
    for _ in 0..gates {
        let kind = if rng.random::<f64>() < fraction_1q {
            let base = BaseGate::CLIFFORD_T[rng.random_range(0..BaseGate::CLIFFORD_T.len())];
            GateKind::single(base, rng.random_range(0..w))
        } else {
            let a = rng.random_range(0..w);
            let mut b = rng.random_range(0..w - 1);
            if b >= a {
                b += 1;
            }
            match rng.random_range(0..palette) {
                0 => GateKind::cx(a, b),
                1 => GateKind::cz(a, b),
                _ => GateKind::swap(a, b),
            }
        };
        circuit.push(kind).expect("generated gates are in range");
    }
    Ok(circuit)
}

/// [`random_circuit`] with a palette including SWAP, seeded directly.
pub fn random_circuit_seeded(w: usize, gates: usize, fraction_1q: f64, seed: u64) -> Result<Circuit, BenchError> {
    random_circuit(w, gates, fraction_1q, true, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A uniformly random dead set of the size `mode` prescribes at width `w`.
pub fn select_dead<R: Rng + ?Sized>(w: usize, mode: DeadMode, rng: &mut R) -> Result<Vec<QubitId>, BenchError> {
    let k = mode.count(w)?;
    let mut order: Vec<usize> = (0..w).collect();
    order.shuffle(rng);
    let mut dead: Vec<QubitId> = order[..k].iter().map(|&q| QubitId(q)).collect();
    dead.sort();
    Ok(dead)
}

/// The circuit of one block and its RNG stream for dead-qubit selection.
pub fn block_inputs(cfg: &BenchConfig, width: usize, program: usize, block: usize) -> (Circuit, ChaCha8Rng) {
    let block_seed = seed::derive(&[cfg.seed, width as u64, program as u64, block as u64]);
    let mut circuit_rng = ChaCha8Rng::seed_from_u64(block_seed);
    circuit_rng.set_stream(0);
    let mut dead_rng = ChaCha8Rng::seed_from_u64(block_seed);
    dead_rng.set_stream(1);
    let circuit = random_circuit(
        width,
        cfg.gate_multiplier * width,
        cfg.single_qubit_fraction,
        cfg.swap,
        &mut circuit_rng,
    )
    .expect("width validated");
    (circuit, dead_rng)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub width: usize,
    pub dead_mode: DeadMode,
    pub dead_count: usize,
    pub program: usize,
    pub block: usize,
    pub gates_before: usize,
    pub gates_removed: usize,
    pub elapsed_micros: f64,
    pub gate_checks: usize,
    pub sweeps: usize,
    /// `Some(true)` when the block was spot-checked against the oracle.
    pub verified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub width: usize,
    pub dead_mode: DeadMode,
    pub dead_count: usize,
    pub mean_removed: f64,
    pub mean_micros: f64,
    pub programs: usize,
    pub blocks: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRun {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<SummaryRow>,
}

fn mode_index(cfg: &BenchConfig, mode: DeadMode) -> usize {
    cfg.dead_modes.iter().position(|m| *m == mode).unwrap_or(usize::MAX)
}

fn should_verify(cfg: &BenchConfig, width: usize, program: usize, block: usize) -> bool {
    if width > VERIFY_MAX_WIDTH || cfg.verify_fraction <= 0.0 {
        return false;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(&[cfg.seed, width as u64, program as u64, block as u64]));
    rng.set_stream(2);
    rng.random::<f64>() < cfg.verify_fraction
}

fn run_program(cfg: &BenchConfig, width: usize, mode: DeadMode, program: usize) -> Result<Vec<BenchRecord>, BenchError> {
    let mut out = Vec::with_capacity(cfg.blocks);
    for block in 0..cfg.blocks {
        let (circuit, mut dead_rng) = block_inputs(cfg, width, program, block);
        let dead = select_dead(width, mode, &mut dead_rng)?;
        let circuit = circuit.with_dead(dead.iter().copied()).expect("dead set in range");
        let input = circuit.clone();
        let start = Instant::now();
        let (optimized, report) = eliminate_dead_gates(input, PassConfig::default());
        let elapsed_micros = start.elapsed().as_secs_f64() * 1e6;

        let verified = if should_verify(cfg, width, program, block) {
            let options = EquivalenceOptions {
                samples: cfg.verify_samples,
                seed: seed::derive(&[cfg.seed, width as u64, program as u64, block as u64, 3]),
                ..EquivalenceOptions::default()
            };
            let verdict = Verifier::new(options, OpaqueBindings::new())
                .check_optimized(&circuit, &optimized)
                .map_err(|e| BenchError::Oracle(e.to_string()))?;
            if !verdict.equivalent {
                return Err(BenchError::Verification {
                    width,
                    mode,
                    program,
                    block,
                    discrepancy: verdict.max_discrepancy,
                });
            }
            Some(true)
        } else {
            None
        };

        out.push(BenchRecord {
            width,
            dead_mode: mode,
            dead_count: dead.len(),
            program,
            block,
            gates_before: report.initial_gate_count,
            gates_removed: report.removed.len(),
            elapsed_micros,
            gate_checks: report.gate_checks,
            sweeps: report.iterations,
            verified,
        });
    }
    Ok(out)
}

/// Runs every (width, dead mode, program, block) combination.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchRun, BenchError> {
    cfg.validate()?;
    let tasks: Vec<(usize, DeadMode, usize)> = cfg
        .widths
        .iter()
        .flat_map(|&w| {
            cfg.dead_modes
                .iter()
                .flat_map(move |&m| (0..cfg.programs).map(move |p| (w, m, p)))
        })
        .collect();

    let chunks: Vec<Vec<BenchRecord>> = if cfg.parallel {
        tasks
            .par_iter()
            .map(|&(w, m, p)| run_program(cfg, w, m, p))
            .collect::<Result<_, _>>()?
    } else {
        tasks
            .iter()
            .map(|&(w, m, p)| run_program(cfg, w, m, p))
            .collect::<Result<_, _>>()?
    };
    let mut records: Vec<BenchRecord> = chunks.into_iter().flatten().collect();
    records.sort_by_key(|r| (r.width, mode_index(cfg, r.dead_mode), r.program, r.block));

    let summary = summarize(cfg, &records);
    Ok(BenchRun { records, summary })
}

fn summarize(cfg: &BenchConfig, records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for group in records.chunk_by(|a, b| a.width == b.width && a.dead_mode == b.dead_mode) {
        let count = group.len() as f64;
        rows.push(SummaryRow {
            width: group[0].width,
            dead_mode: group[0].dead_mode,
            dead_count: group[0].dead_count,
            mean_removed: group.iter().map(|r| r.gates_removed as f64).sum::<f64>() / count,
            mean_micros: group.iter().map(|r| r.elapsed_micros).sum::<f64>() / count,
            programs: cfg.programs,
            blocks: cfg.blocks,
            seed: cfg.seed,
        });
    }
    rows
}

/// Writes the summary CSV. `dead_mode` is rendered as `<mode>/<dead count>`,
/// e.g. `pct:20/2`.
pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<(), BenchError> {
    let io = |e: csv::Error| BenchError::Io(e.to_string());
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        writer
            .write_record([
                row.width.to_string(),
                format!("{}/{}", row.dead_mode, row.dead_count),
                format!("{:.4}", row.mean_removed),
                format!("{:.3}", row.mean_micros),
                row.programs.to_string(),
                row.blocks.to_string(),
                row.seed.to_string(),
            ])
            .map_err(io)?;
    }
    writer.flush().map_err(|e| BenchError::Io(e.to_string()))
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut buf = Vec::new();
    write_summary_csv(rows, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

/// Written next to the CSV so a run can be reproduced.
#[derive(Debug, Clone, Serialize)]
pub struct BenchManifest<'a> {
    pub tool: &'a str,
    pub version: &'a str,
    pub dialect: &'a str,
    pub config: &'a BenchConfig,
    pub rows: usize,
    pub records: usize,
    pub spot_checked: usize,
}

impl<'a> BenchManifest<'a> {
    pub fn new(config: &'a BenchConfig, run: &BenchRun) -> Self {
        BenchManifest {
            tool: "dge",
            version: env!("CARGO_PKG_VERSION"),
            dialect: crate::qasm::DIALECT_VERSION,
            config,
            rows: run.summary.len(),
            records: run.records.len(),
            spot_checked: run.records.iter().filter(|r| r.verified.is_some()).count(),
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dead_mode_counts() {
        assert_eq!(DeadMode::Percent(10).count(10).unwrap(), 1);
        assert_eq!(DeadMode::Percent(20).count(10).unwrap(), 2);
        assert_eq!(DeadMode::Percent(10).count(4).unwrap(), 1);
        assert!(DeadMode::Fixed(3).count(3).is_err());
        assert_eq!(DeadMode::Fixed(2).count(3).unwrap(), 2);
    }

    #[test]
    fn dead_mode_parse_and_display() {
        for s in ["fixed:1", "fixed:3", "pct:10", "pct:20"] {
            assert_eq!(s.parse::<DeadMode>().unwrap().to_string(), s);
        }
        assert_eq!("percent:20".parse::<DeadMode>().unwrap(), DeadMode::Percent(20));
        for s in ["fixed", "fixed:0", "pct:0", "pct:100", "half:2", "fixed:x"] {
            assert!(s.parse::<DeadMode>().is_err(), "{s}");
        }
    }

    #[test]
    fn random_circuit_shape() {
        let c = random_circuit_seeded(5, 300, 0.1, 11).unwrap();
        assert_eq!(c.len(), 300);
        assert_eq!(c, random_circuit_seeded(5, 300, 0.1, 11).unwrap());
        assert!(random_circuit_seeded(5, 0, 0.1, 1).unwrap().is_empty());
        assert!(random_circuit_seeded(1, 5, 0.1, 1).is_err());
        let no_swap = random_circuit(4, 500, 0.1, false, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!(no_swap.gates().all(|g| !matches!(g.kind, GateKind::Swap { .. })));
    }

    #[test]
    fn select_dead_is_nested() {
        for seed in 0..20 {
            let mut a = ChaCha8Rng::seed_from_u64(seed);
            let mut b = ChaCha8Rng::seed_from_u64(seed);
            let small = select_dead(20, DeadMode::Percent(10), &mut a).unwrap();
            let large = select_dead(20, DeadMode::Percent(20), &mut b).unwrap();
            assert_eq!(small.len(), 2);
            assert_eq!(large.len(), 4);
            assert!(small.iter().all(|q| large.contains(q)));
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = BenchConfig {
            widths: vec![4],
            dead_modes: vec![DeadMode::Fixed(5)],
            ..BenchConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(BenchError::DeadCount { .. })));
        cfg.dead_modes = vec![DeadMode::Fixed(1)];
        cfg.single_qubit_fraction = 1.0;
        assert!(cfg.validate().is_err());
        cfg.single_qubit_fraction = 0.1;
        cfg.widths = vec![1];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn small_run_is_reproducible() {
        let cfg = BenchConfig {
            widths: vec![3, 6],
            dead_modes: vec![DeadMode::Fixed(1), DeadMode::Percent(20)],
            programs: 3,
            blocks: 2,
            gate_multiplier: 10,
            verify_fraction: 1.0,
            seed: 9,
            ..BenchConfig::default()
        };
        let run = run_bench(&cfg).unwrap();
        assert_eq!(run.records.len(), 2 * 2 * 3 * 2);
        assert!(run.records.iter().all(|r| r.verified == Some(true)));
        assert_eq!(run.summary.len(), 4);
        let par = run_bench(&BenchConfig { parallel: true, ..cfg.clone() }).unwrap();
        let strip = |r: &BenchRun| {
            r.records
                .iter()
                .map(|x| (x.width, x.dead_mode, x.program, x.block, x.gates_removed, x.gate_checks))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&run), strip(&par));
        let csv = summary_csv(&run.summary);
        assert!(csv.starts_with("width,dead_mode,mean_removed,mean_micros,programs,blocks,seed\n"));
        assert!(csv.contains(",pct:20/1,"));
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..10).map(|x| (x as f64, 3.0 * (x as f64).powf(1.3))).collect();
        assert!((loglog_slope(&pts).unwrap() - 1.3).abs() < 1e-12);
        assert!(loglog_slope(&[(1.0, 1.0)]).is_none());
    }
}
