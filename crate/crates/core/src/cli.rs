//! Batch front end: the operations behind the `qwmc` binary.
//!
//! Exit codes: 1 for input, parse and validation errors, 2 when the counter
//! hits a resource limit, 3 when an external counter fails.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bench::{self, BenchConfig, BenchError, Family};
use crate::circuit::{parse_qasm, Circuit, CircuitError, MeasurementSpec, QasmError};
use crate::cnf::WeightedCnf;
use crate::encoder::{build, probability_from_count, EncodeError, Encoding};
use crate::oracle::{measure_probability, simulate_statevector, OracleError};
use crate::wmc::{Branching, Counter, CounterConfig, WmcError};

/// Agreement tolerance between two probabilities.
pub const AGREEMENT_TOLERANCE: f64 = 1e-8;

/// Environment variables capping the built-in counter.
pub const ENV_TIME_LIMIT: &str = "QWMC_TIME_LIMIT_SECS";
pub const ENV_MAX_DECISIONS: &str = "QWMC_MAX_DECISIONS";
pub const ENV_CACHE_ENTRIES: &str = "QWMC_CACHE_ENTRIES";
/// `lowest` or `occurrences`.
pub const ENV_BRANCHING: &str = "QWMC_BRANCHING";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Qasm { path: PathBuf, source: QasmError },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("counter: {0}")]
    Counter(WmcError),
    #[error("external counter: {0}")]
    External(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Counter(WmcError::ResourceLimit(_)) => 2,
            CliError::External(_) => 3,
            _ => 1,
        }
    }
}

impl From<WmcError> for CliError {
    fn from(e: WmcError) -> Self {
        CliError::Counter(e)
    }
}

/// Which counter evaluates the formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    Builtin,
    /// Executable invoked as `<path> <dimacs-file>`.
    External(PathBuf),
}

impl Backend {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "builtin" => Ok(Backend::Builtin),
            _ => match s.strip_prefix("external:") {
                Some(p) if !p.is_empty() => Ok(Backend::External(PathBuf::from(p))),
                _ => Err(CliError::Usage(format!("unknown backend `{s}`"))),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            Backend::Builtin => "builtin".into(),
            Backend::External(p) => format!("external:{}", p.display()),
        }
    }
}

/// Counter limits from the environment; unset or unparsable values leave
/// the default.
pub fn counter_config_from_env() -> CounterConfig {
    let mut cfg = CounterConfig::default();
    let get = |k: &str| std::env::var(k).ok().and_then(|v| v.trim().parse::<f64>().ok());
    if let Some(s) = get(ENV_TIME_LIMIT) {
        if s > 0.0 {
            cfg.time_limit = Some(Duration::from_secs_f64(s));
        }
    }
    if let Some(d) = get(ENV_MAX_DECISIONS) {
        cfg.max_decisions = Some(d as u64);
    }
    if let Some(c) = get(ENV_CACHE_ENTRIES) {
        cfg.cache_capacity = (c as usize).max(1);
    }
    match std::env::var(ENV_BRANCHING).as_deref() {
        Ok("lowest") => cfg.branching = Branching::LowestId,
        Ok("occurrences") => cfg.branching = Branching::MostOccurrences,
        _ => {}
    }
    cfg
}

/// Extracts the count from a model counter's stdout: the last
/// `c s exact ...` line wins (value = last token); failing that, the last
/// `s <number>` line; a final `s UNSATISFIABLE` means 0.
pub fn parse_counter_output(text: &str) -> Option<f64> {
    let mut exact = None;
    let mut plain = None;
    for line in text.lines() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["c", "s", "exact", .., last] => {
                if let Ok(v) = last.parse::<f64>() {
                    exact = Some(v);
                }
            }
            ["s", "UNSATISFIABLE"] => plain = Some(0.0),
            ["s", rest @ ..] if !rest.is_empty() => {
                if let Ok(v) = rest[rest.len() - 1].parse::<f64>() {
                    plain = Some(v);
                }
            }
            _ => {}
        }
    }
    exact.or(plain)
}

/// Writes `cnf` to a temporary file, runs `exe` on it and parses the count.
pub fn run_external(exe: &Path, cnf: &WeightedCnf) -> Result<f64, CliError> {
    let dir = tempfile::tempdir().map_err(|e| CliError::External(e.to_string()))?;
    let file = dir.path().join("formula.cnf");
    fs::write(&file, cnf.to_dimacs()).map_err(|e| CliError::External(e.to_string()))?;
    let out = Command::new(exe)
        .arg(&file)
        .output()
        .map_err(|e| CliError::External(format!("{}: {e}", exe.display())))?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    if !out.status.success() {
        // several counters exit 10/20 like SAT solvers
        if !matches!(out.status.code(), Some(10) | Some(20)) {
            return Err(CliError::External(format!(
                "{} exited with {}",
                exe.display(),
                out.status
            )));
        }
    }
    parse_counter_output(&stdout).ok_or_else(|| CliError::External("no count in counter output".into()))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub parse_ms: f64,
    pub encode_ms: f64,
    pub count_ms: f64,
}

/// Outcome of one simulate or oracle run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub input: String,
    pub n: usize,
    pub m: usize,
    pub measure: String,
    pub measured_qubits: usize,
    pub vars: Option<usize>,
    pub clauses: Option<usize>,
    pub count: Option<f64>,
    pub probability: f64,
    pub backend: String,
    pub timings: Timings,
}

impl RunReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "input        {}", self.input).unwrap();
        writeln!(s, "qubits       {}", self.n).unwrap();
        writeln!(s, "gates        {}", self.m).unwrap();
        writeln!(s, "measure      {}", self.measure).unwrap();
        if let (Some(v), Some(c)) = (self.vars, self.clauses) {
            writeln!(s, "cnf          {v} vars, {c} clauses").unwrap();
        }
        if let Some(c) = self.count {
            writeln!(s, "count        {c:?}").unwrap();
        }
        writeln!(s, "probability  {:?}", self.probability).unwrap();
        writeln!(s, "backend      {}", self.backend).unwrap();
        writeln!(
            s,
            "time         parse {:.3} ms, encode {:.3} ms, count {:.3} ms",
            self.timings.parse_ms, self.timings.encode_ms, self.timings.count_ms
        )
        .unwrap();
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct SimulateArgs {
    pub input: PathBuf,
    pub measure: String,
    pub backend: Backend,
    pub emit_cnf: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct EncodeArgs {
    pub input: PathBuf,
    pub measure: String,
    pub output: PathBuf,
}

#[derive(Clone, Debug)]
pub struct OracleArgs {
    pub input: PathBuf,
    pub measure: String,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn load(path: &Path) -> Result<Circuit, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_qasm(&text).map_err(|source| CliError::Qasm {
        path: path.to_path_buf(),
        source,
    })
}

/// Lowered circuit, measurement and its formula.
struct Prepared {
    circuit: Circuit,
    spec: MeasurementSpec,
    encoding: Encoding,
    parse: Duration,
    encode: Duration,
}

fn prepare(input: &Path, measure: &str) -> Result<Prepared, CliError> {
    let t0 = Instant::now();
    let circuit = load(input)?.lower();
    let spec = MeasurementSpec::parse(measure, circuit.num_qubits())?;
    let parse = t0.elapsed();
    let t1 = Instant::now();
    let encoding = build(&circuit, &spec)?;
    Ok(Prepared {
        circuit,
        spec,
        encoding,
        parse,
        encode: t1.elapsed(),
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Counts a formula with the chosen backend.
pub fn count_with(backend: &Backend, cnf: &WeightedCnf) -> Result<f64, CliError> {
    match backend {
        Backend::Builtin => Ok(Counter::new(counter_config_from_env()).count(cnf)?.value),
        Backend::External(exe) => run_external(exe, cnf),
    }
}

/// parse → lower → build → count → probability.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<RunReport, CliError> {
    let p = prepare(&args.input, &args.measure)?;
    if let Some(path) = &args.emit_cnf {
        write_file(path, &p.encoding.cnf.to_dimacs())?;
    }
    let t = Instant::now();
    let count = count_with(&args.backend, &p.encoding.cnf)?;
    let count_time = t.elapsed();
    let probability = probability_from_count(count, p.encoding.measured)?;
    Ok(RunReport {
        input: args.input.display().to_string(),
        n: p.circuit.num_qubits(),
        m: p.circuit.len(),
        measure: p.spec.to_string(),
        measured_qubits: p.spec.len(),
        vars: Some(p.encoding.cnf.var_count()),
        clauses: Some(p.encoding.cnf.clauses().len()),
        count: Some(count),
        probability,
        backend: args.backend.label(),
        timings: Timings {
            parse_ms: ms(p.parse),
            encode_ms: ms(p.encode),
            count_ms: ms(count_time),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EncodeReport {
    pub input: String,
    pub output: String,
    pub n: usize,
    pub m: usize,
    pub vars: usize,
    pub clauses: usize,
}

/// Builds the formula and writes it as weighted DIMACS.
pub fn cmd_encode(args: &EncodeArgs) -> Result<EncodeReport, CliError> {
    let p = prepare(&args.input, &args.measure)?;
    write_file(&args.output, &p.encoding.cnf.to_dimacs())?;
    Ok(EncodeReport {
        input: args.input.display().to_string(),
        output: args.output.display().to_string(),
        n: p.circuit.num_qubits(),
        m: p.circuit.len(),
        vars: p.encoding.cnf.var_count(),
        clauses: p.encoding.cnf.clauses().len(),
    })
}

/// Statevector probability for the same measurement.
pub fn cmd_oracle(args: &OracleArgs) -> Result<RunReport, CliError> {
    let t0 = Instant::now();
    let circuit = load(&args.input)?;
    let spec = MeasurementSpec::parse(&args.measure, circuit.num_qubits())?;
    let parse = t0.elapsed();
    let t1 = Instant::now();
    let psi = simulate_statevector(&circuit)?;
    let probability = measure_probability(&psi, &spec);
    Ok(RunReport {
        input: args.input.display().to_string(),
        n: circuit.num_qubits(),
        m: circuit.lower().len(),
        measure: spec.to_string(),
        measured_qubits: spec.len(),
        vars: None,
        clauses: None,
        count: None,
        probability,
        backend: "statevector".into(),
        timings: Timings {
            parse_ms: ms(parse),
            encode_ms: 0.0,
            count_ms: ms(t1.elapsed()),
        },
    })
}

#[derive(Clone, Debug)]
pub struct BenchArgs {
    pub family: Family,
    pub n: usize,
    pub depth: usize,
    pub t_count: usize,
    pub runs: usize,
    pub seed: u64,
    /// Include RX/RY/RZ in the ratio-random mix.
    pub rotations: bool,
    pub out_dir: Option<PathBuf>,
    pub solve: bool,
    pub measure: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub seed: u64,
    pub file: Option<String>,
    pub n: usize,
    pub m: usize,
    pub rotations: usize,
    pub vars: Option<usize>,
    pub clauses: Option<usize>,
    pub p_wmc: Option<f64>,
    pub p_oracle: Option<f64>,
    pub agree: Option<bool>,
    pub wmc_ms: Option<f64>,
    pub oracle_ms: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BenchSummary {
    pub rows: Vec<BenchRow>,
}

impl BenchSummary {
    pub fn agreed(&self) -> usize {
        self.rows.iter().filter(|r| r.agree == Some(true)).count()
    }

    pub fn to_table(&self) -> String {
        let mut s = String::from("seed\tn\tm\trot\tvars\tclauses\tp_wmc\tp_oracle\tagree\twmc_ms\toracle_ms\n");
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        for r in &self.rows {
            writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.seed,
                r.n,
                r.m,
                r.rotations,
                opt(r.vars.map(|v| v.to_string())),
                opt(r.clauses.map(|v| v.to_string())),
                opt(r.p_wmc.map(|v| format!("{v:.12}"))),
                opt(r.p_oracle.map(|v| format!("{v:.12}"))),
                opt(r.agree.map(|v| v.to_string())),
                opt(r.wmc_ms.map(|v| format!("{v:.2}"))),
                opt(r.oracle_ms.map(|v| format!("{v:.2}"))),
            )
            .unwrap();
        }
        if !self.rows.is_empty() && self.rows.iter().any(|r| r.agree.is_some()) {
            writeln!(s, "agreement {}/{}", self.agreed(), self.rows.len()).unwrap();
        }
        s
    }
}

fn bench_one(args: &BenchArgs, seed: u64) -> Result<BenchRow, CliError> {
    let cfg = match args.family {
        Family::RatioRandom => {
            let cfg = BenchConfig::ratio_random(args.n, args.depth, seed);
            if args.rotations {
                cfg.with_ratios(bench::rotation_ratios())
            } else {
                cfg
            }
        }
        Family::PauliExp => BenchConfig::pauli_exp(args.n, args.t_count, seed),
    };
    let circuit = bench::generate(&cfg)?;
    let family = match args.family {
        Family::RatioRandom => "ratio-random",
        Family::PauliExp => "pauli-exp",
    };
    let file = match &args.out_dir {
        Some(dir) => {
            let path = dir.join(format!("{family}-n{}-s{seed}.qasm", args.n));
            write_file(&path, &circuit.to_qasm())?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let lowered = circuit.lower();
    let mut row = BenchRow {
        seed,
        file,
        n: args.n,
        m: lowered.len(),
        rotations: lowered.gates().iter().filter(|g| g.kind().is_rotation()).count(),
        vars: None,
        clauses: None,
        p_wmc: None,
        p_oracle: None,
        agree: None,
        wmc_ms: None,
        oracle_ms: None,
    };
    if args.solve {
        let spec = MeasurementSpec::parse(&args.measure, args.n)?;
        let t = Instant::now();
        let enc = build(&lowered, &spec)?;
        let count = Counter::new(counter_config_from_env()).count(&enc.cnf)?.value;
        let p = probability_from_count(count, enc.measured)?;
        row.wmc_ms = Some(ms(t.elapsed()));
        row.vars = Some(enc.cnf.var_count());
        row.clauses = Some(enc.cnf.clauses().len());
        row.p_wmc = Some(p);
        if args.n <= crate::oracle::MAX_QUBITS {
            let t = Instant::now();
            let q = measure_probability(&simulate_statevector(&circuit)?, &spec);
            row.oracle_ms = Some(ms(t.elapsed()));
            row.p_oracle = Some(q);
            row.agree = Some((p - q).abs() < AGREEMENT_TOLERANCE);
        }
    }
    Ok(row)
}

/// Generates `runs` circuits with seeds `seed, seed+1, ...`, optionally
/// solving each with both the counter and the statevector oracle. Runs are
/// spread over worker threads; rows stay in seed order.
pub fn cmd_bench(args: &BenchArgs) -> Result<BenchSummary, CliError> {
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
    }
    let rows = (0..args.runs as u64)
        .into_par_iter()
        .map(|i| bench_one(args, args.seed.wrapping_add(i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BenchSummary { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backend_forms() {
        assert_eq!(Backend::parse("builtin").unwrap(), Backend::Builtin);
        assert_eq!(
            Backend::parse("external:/opt/gpmc").unwrap(),
            Backend::External("/opt/gpmc".into())
        );
        assert!(Backend::parse("external:").is_err());
        assert!(Backend::parse("gpmc").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Counter(WmcError::ResourceLimit("t".into())).exit_code(), 2);
        assert_eq!(CliError::External("boom".into()).exit_code(), 3);
    }
}
