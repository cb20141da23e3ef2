//! The `dge` command: `optimize`, `verify` and `bench`.
//!
//! Exit codes: 0 success (or equivalent), 1 inequivalent, 2 usage, parse or
//! I/O error.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dge_core::bench::{self, BenchConfig, BenchManifest, DeadMode};
use dge_core::pass::{eliminate_dead_gates, OptimizationReport, PassConfig};
use dge_core::qasm::{self, SourceCircuit};
use dge_core::sim::{EquivalenceOptions, EquivalenceVerdict, OpaqueBindings, Verifier, DEFAULT_QUBIT_LIMIT};
use dge_core::QubitId;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INEQUIVALENT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (dialect ", "dge-qasm/1", ")");

#[derive(Debug, Parser)]
#[command(name = "dge", version = VERSION, about = "Dead-gate elimination for circuits with discarded outcomes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Remove dead gates and write the optimized circuit.
    Optimize(OptimizeArgs),
    /// Compare the valid-outcome distributions of two circuits.
    Verify(VerifyArgs),
    /// Run the random-circuit benchmark and write a summary CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    input: PathBuf,
    output: PathBuf,
    /// Write a JSON report of the removals here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also remove frontier gates all of whose qubits are dead.
    #[arg(long)]
    extended: bool,
    /// Never remove SWAP gates.
    #[arg(long)]
    no_swap_relabel: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    first: PathBuf,
    second: PathBuf,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Seeds both the random input states and the opaque-block unitaries.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_QUBIT_LIMIT)]
    qubit_limit: usize,
    /// Dead-qubit pairing `e:f,...` (qubit indices): compare the first
    /// circuit on its valid qubits against the second with each `f`
    /// read in place of `e`.
    #[arg(long)]
    map: Option<String>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// `start:end:step` (inclusive) or a comma-separated list.
    #[arg(long, default_value = "2:40:2")]
    widths: String,
    /// `fixed:K` or `pct:P`; repeat or comma-separate for several modes.
    #[arg(long = "dead", value_delimiter = ',', default_value = "fixed:1")]
    dead: Vec<String>,
    #[arg(long, default_value_t = 20)]
    programs: usize,
    #[arg(long, default_value_t = 10)]
    blocks: usize,
    #[arg(long, default_value_t = 100)]
    gate_multiplier: usize,
    #[arg(long, default_value_t = 0.1)]
    single_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave SWAP out of the two-qubit palette.
    #[arg(long)]
    no_swap: bool,
    #[arg(long, default_value_t = 0.05)]
    verify_fraction: f64,
    #[arg(long, default_value_t = 20)]
    verify_samples: usize,
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    out: PathBuf,
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn fail(msg: impl Into<String>) -> Failure {
    Failure(msg.into())
}

fn read_source(path: &Path) -> Result<SourceCircuit, Failure> {
    let text = fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    qasm::parse(&text).map_err(|e| fail(format!("{}:{}: {}", path.display(), e.line, e.kind)))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| fail(format!("{}: {e}", path.display())))
}

/// Parses the arguments and runs the command, writing to the given streams.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Optimize(a) => optimize(a, stdout),
        Command::Verify(a) => verify(a, stdout),
        Command::Bench(a) => run_bench(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn optimize(args: OptimizeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let source = read_source(&args.input)?;
    let config = PassConfig {
        swap_relabel: !args.no_swap_relabel,
        extended: args.extended,
    };
    let (optimized, report) = eliminate_dead_gates(source.circuit.clone(), config);
    write_file(&args.output, &source.with_circuit(optimized).to_qasm())?;
    if let Some(path) = &args.report {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(path, &(json + "\n"))?;
    }
    print_summary(out, &report).map_err(|e| fail(e.to_string()))?;
    Ok(EXIT_OK)
}

fn print_summary(out: &mut dyn Write, report: &OptimizationReport) -> std::io::Result<()> {
    writeln!(
        out,
        "removed {} of {} gates in {} sweeps",
        report.removed.len(),
        report.initial_gate_count,
        report.iterations
    )?;
    for r in &report.removed {
        writeln!(out, "  {:<5} {:<26} {}", r.gate.to_string(), r.rule.tag(), r.summary)?;
    }
    let dead: Vec<String> = report.final_dead.iter().map(|q| q.to_string()).collect();
    writeln!(out, "dead: {{{}}}", dead.join(", "))?;
    if !report.outcome_map.is_identity() {
        let map: Vec<String> = report
            .outcome_map
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(l, w)| *l != w.0)
            .map(|(l, w)| format!("{l}->{}", w.0))
            .collect();
        writeln!(out, "outcome map: {}", map.join(" "))?;
    }
    Ok(())
}

fn parse_pairing(spec: &str) -> Result<Vec<(QubitId, QubitId)>, Failure> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (e, f) = pair
                .split_once(':')
                .ok_or_else(|| fail(format!("bad --map entry `{pair}`; expected e:f")))?;
            let idx = |s: &str| {
                let s = s.trim();
                let s = s.strip_prefix("q[").and_then(|s| s.strip_suffix(']')).unwrap_or(s);
                s.parse::<usize>()
                    .map(QubitId)
                    .map_err(|_| fail(format!("bad qubit `{s}` in --map")))
            };
            Ok((idx(e)?, idx(f)?))
        })
        .collect()
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    verdict: &'a EquivalenceVerdict,
    qubits: usize,
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let a = read_source(&args.first)?;
    let b = read_source(&args.second)?;
    let n = a.circuit.num_qubits();
    if b.circuit.num_qubits() != n {
        return Err(fail(format!("qubit count mismatch: {n} vs {}", b.circuit.num_qubits())));
    }
    if n > args.qubit_limit {
        return Err(fail(format!("{n} qubits exceeds --qubit-limit {}", args.qubit_limit)));
    }
    if !(args.tol >= 0.0) || args.samples == 0 {
        return Err(fail("--samples must be positive and --tol non-negative"));
    }
    for da in &a.opaques {
        if let Some(db) = b.opaques.iter().find(|d| d.label == da.label) {
            if db.arity != da.arity {
                return Err(fail(format!("opaque `{}` has arity {} and {}", da.label, da.arity, db.arity)));
            }
        }
    }

    let bindings = OpaqueBindings::haar_for_circuits([&a.circuit, &b.circuit], args.seed);
    let options = EquivalenceOptions {
        samples: args.samples,
        seed: args.seed,
        tol: args.tol,
        qubit_limit: args.qubit_limit,
    };
    let verifier = Verifier::new(options, bindings);

    let verdict = match &args.map {
        Some(spec) => {
            let pairing = parse_pairing(spec)?;
            verifier
                .check_equiv_extended(&a.circuit, &b.circuit, a.circuit.dead(), b.circuit.dead(), &pairing)
                .map_err(|e| fail(e.to_string()))?
        }
        None => {
            let ra = a.valid_readout();
            let rb = b.valid_readout();
            let bits_a: BTreeSet<usize> = ra.iter().map(|r| r.0).collect();
            let bits_b: BTreeSet<usize> = rb.iter().map(|r| r.0).collect();
            if bits_a != bits_b {
                return Err(fail(format!(
                    "the circuits keep different classical bits: {bits_a:?} vs {bits_b:?}"
                )));
            }
            let wa: Vec<QubitId> = ra.iter().map(|r| r.1).collect();
            let wb: Vec<QubitId> = rb.iter().map(|r| r.1).collect();
            verifier
                .check_mapped(&a.circuit, &b.circuit, &wa, &wb)
                .map_err(|e| fail(e.to_string()))?
        }
    };

    let io = |e: std::io::Error| fail(e.to_string());
    writeln!(
        out,
        "{} (max discrepancy {:e}, {} samples, tol {:e})",
        if verdict.equivalent { "equivalent" } else { "NOT equivalent" },
        verdict.max_discrepancy,
        verdict.samples,
        verdict.tol
    )
    .map_err(io)?;
    if let Some(w) = &verdict.witness {
        writeln!(
            out,
            "witness: seed {} sample {} outcome {}: {:.12} vs {:.12}",
            w.seed, w.sample, w.bitstring, w.p_first, w.p_second
        )
        .map_err(io)?;
    }
    let json = serde_json::to_string(&VerifyOutput { verdict: &verdict, qubits: n }).expect("verdict serializes");
    writeln!(out, "{json}").map_err(io)?;
    Ok(if verdict.equivalent { EXIT_OK } else { EXIT_INEQUIVALENT })
}

fn parse_widths(spec: &str) -> Result<Vec<usize>, Failure> {
    let bad = || fail(format!("bad --widths `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    let widths: Vec<usize> = if parts.len() == 3 {
        let nums: Vec<usize> = parts.iter().map(|p| p.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
        if nums[2] == 0 || nums[0] > nums[1] {
            return Err(bad());
        }
        (nums[0]..=nums[1]).step_by(nums[2]).collect()
    } else if parts.len() == 1 {
        spec.split(',').map(|p| p.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?
    } else {
        return Err(bad());
    };
    if widths.is_empty() {
        return Err(bad());
    }
    Ok(widths)
}

fn run_bench(args: BenchArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let dead_modes: Vec<DeadMode> = args
        .dead
        .iter()
        .map(|s| s.parse::<DeadMode>().map_err(|e| fail(e.to_string())))
        .collect::<Result<_, _>>()?;
    let cfg = BenchConfig {
        widths: parse_widths(&args.widths)?,
        dead_modes,
        gate_multiplier: args.gate_multiplier,
        single_qubit_fraction: args.single_fraction,
        blocks: args.blocks,
        programs: args.programs,
        seed: args.seed,
        swap: !args.no_swap,
        verify_fraction: args.verify_fraction,
        verify_samples: args.verify_samples,
        parallel: args.parallel,
    };
    cfg.validate().map_err(|e| fail(e.to_string()))?;
    let run = bench::run_bench(&cfg).map_err(|e| fail(e.to_string()))?;

    write_file(&args.out, &bench::summary_csv(&run.summary))?;
    let manifest = serde_json::to_string_pretty(&BenchManifest::new(&cfg, &run)).expect("manifest serializes");
    let mut manifest_path = args.out.clone().into_os_string();
    manifest_path.push(".manifest.json");
    write_file(Path::new(&manifest_path), &(manifest + "\n"))?;

    let spot = run.records.iter().filter(|r| r.verified.is_some()).count();
    writeln!(
        out,
        "{} rows, {} circuits ({} spot-checked) -> {}",
        run.summary.len(),
        run.records.len(),
        spot,
        args.out.display()
    )
    .map_err(|e| fail(e.to_string()))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dge_core::qasm::DIALECT_VERSION;

    #[test]
    fn width_specs() {
        assert_eq!(parse_widths("2:10:4").unwrap(), vec![2, 6, 10]);
        assert_eq!(parse_widths("4").unwrap(), vec![4]);
        assert_eq!(parse_widths("3,5").unwrap(), vec![3, 5]);
        assert!(parse_widths("10:2:2").is_err());
        assert!(parse_widths("2:10:0").is_err());
        assert!(parse_widths("a").is_err());
    }

    #[test]
    fn pairing_specs() {
        assert_eq!(parse_pairing("0:1").unwrap(), vec![(QubitId(0), QubitId(1))]);
        assert_eq!(parse_pairing("q[2]:q[0], 1:3").unwrap().len(), 2);
        assert!(parse_pairing("0-1").is_err());
    }

    #[test]
    fn version_mentions_dialect() {
        assert!(VERSION.contains(DIALECT_VERSION));
    }
}
