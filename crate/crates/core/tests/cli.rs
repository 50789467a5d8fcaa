mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use qwmc::bench::Family;
use qwmc::circuit::parse_qasm;
use qwmc::cli::{
    cmd_bench, cmd_encode, cmd_oracle, cmd_simulate, count_with, parse_counter_output, Backend, BenchArgs,
    EncodeArgs, OracleArgs, SimulateArgs,
};
use qwmc::cnf::WeightedCnf;
use qwmc::wmc::{count, parse_dimacs};

const WORKED: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\nh q[0];\ncx q[0],q[1];\nt q[0];\ncx q[0],q[1];\nh q[0];\nmeasure q[0] -> c[0];\n";
const GHZ: &str = "OPENQASM 2.0;\nqreg q[3];\nh q[0];\ncx q[0],q[1];\ncx q[1],q[2];\n";

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn simulate(input: PathBuf, measure: &str) -> SimulateArgs {
    SimulateArgs { input, measure: measure.into(), backend: Backend::Builtin, emit_cnf: None }
}

#[test]
fn simulate_and_oracle_agree_on_small_circuits() {
    let dir = tempfile::tempdir().unwrap();
    let worked = write(dir.path(), "worked.qasm", WORKED);
    let ghz = write(dir.path(), "ghz.qasm", GHZ);
    let want = (2.0 + 2f64.sqrt()) / 4.0;

    let r = cmd_simulate(&simulate(worked.clone(), "q0=0")).unwrap();
    assert!((r.probability - want).abs() < 1e-8);
    assert_eq!((r.n, r.m, r.measured_qubits), (2, 5, 1));
    assert!(r.vars.is_some() && r.count.is_some());
    let o = cmd_oracle(&OracleArgs { input: worked, measure: "q0=0".into() }).unwrap();
    assert!((o.probability - want).abs() < 1e-8);
    assert_eq!(o.backend, "statevector");

    let r = cmd_simulate(&simulate(ghz.clone(), "all=0")).unwrap();
    assert!((r.probability - 0.5).abs() < 1e-8);
    let o = cmd_oracle(&OracleArgs { input: ghz, measure: "all=0".into() }).unwrap();
    assert!((o.probability - 0.5).abs() < 1e-8);
}

#[test]
fn report_counts_match_the_solved_formula() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "w.qasm", WORKED);
    let cnf_path = dir.path().join("w.cnf");
    let mut args = simulate(input, "q0=0");
    args.emit_cnf = Some(cnf_path.clone());
    let r = cmd_simulate(&args).unwrap();
    let f = parse_dimacs(&fs::read_to_string(cnf_path).unwrap()).unwrap();
    assert_eq!(r.vars, Some(f.var_count()));
    assert_eq!(r.clauses, Some(f.clauses().len()));
    assert!((r.count.unwrap() - count(&f).unwrap().value).abs() < 1e-12);
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = cmd_simulate(&simulate(dir.path().join("nope.qasm"), "all=0")).unwrap_err();
    assert_eq!(missing.exit_code(), 1);
    let bad = write(dir.path(), "bad.qasm", "OPENQASM 2.0;\nqreg q[1];\nccx q[0],q[0],q[0];\n");
    let e = cmd_simulate(&simulate(bad, "all=0")).unwrap_err();
    assert_eq!(e.exit_code(), 1);
    assert!(e.to_string().contains("ccx"), "{e}");
    let ok = write(dir.path(), "ok.qasm", GHZ);
    assert_eq!(cmd_simulate(&simulate(ok.clone(), "q7=1")).unwrap_err().exit_code(), 1);
    let big = write(dir.path(), "big.qasm", "OPENQASM 2.0;\nqreg q[21];\nh q[0];\n");
    assert_eq!(cmd_oracle(&OracleArgs { input: big, measure: "all=0".into() }).unwrap_err().exit_code(), 1);
}

#[test]
fn encode_writes_reparseable_dimacs() {
    let dir = tempfile::tempdir().unwrap();
    let c = common::random_circuit(4, 40, false, 3);
    let input = write(dir.path(), "c.qasm", &c.to_qasm());
    let output = dir.path().join("c.cnf");
    let r = cmd_encode(&EncodeArgs { input, measure: "all=0".into(), output: output.clone() }).unwrap();
    let f = parse_dimacs(&fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!((f.var_count(), f.clauses().len()), (r.vars, r.clauses));
    assert!(r.vars <= 2 * r.n + 1 + 4 * r.m);

    let empty = write(dir.path(), "e.qasm", "OPENQASM 2.0;\nqreg q[3];\n");
    let out = dir.path().join("e.cnf");
    cmd_encode(&EncodeArgs { input: empty, measure: "all=0".into(), output: out.clone() }).unwrap();
    let f = parse_dimacs(&fs::read_to_string(out).unwrap()).unwrap();
    assert!(f.clauses().iter().all(|c| c.len() == 1));
    assert_eq!(count(&f).unwrap().value, 8.0);
}

#[test]
fn bench_solves_and_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let args = BenchArgs {
        family: Family::RatioRandom,
        n: 6,
        depth: 60,
        t_count: 0,
        runs: 10,
        seed: 0,
        rotations: false,
        out_dir: Some(dir.path().to_path_buf()),
        solve: true,
        measure: "all=0".into(),
    };
    let s = cmd_bench(&args).unwrap();
    assert_eq!(s.rows.len(), 10);
    assert_eq!(s.agreed(), 10, "{}", s.to_table());
    assert_eq!(s.rows.iter().map(|r| r.seed).collect::<Vec<_>>(), (0..10).collect::<Vec<_>>());
    for row in &s.rows {
        let text = fs::read_to_string(row.file.as_ref().unwrap()).unwrap();
        assert_eq!(parse_qasm(&text).unwrap().len(), 60);
    }

    let pe = cmd_bench(&BenchArgs { family: Family::PauliExp, n: 5, t_count: 8, runs: 3, solve: false, ..args.clone() })
        .unwrap();
    assert!(pe.rows.iter().all(|r| r.rotations == 8));
    let none = cmd_bench(&BenchArgs { runs: 0, ..args.clone() }).unwrap();
    assert!(none.rows.is_empty());
    assert_eq!(cmd_bench(&BenchArgs { n: 1, ..args }).unwrap_err().exit_code(), 1);
}

#[test]
fn counter_transcripts() {
    let gpmc = "c o GPMC\nc o Parsing...\ns SATISFIABLE\nc s type wmc\nc s log10-estimate -0.0687\nc s exact double float 8.5355339059327373e-01\n";
    assert_eq!(parse_counter_output(gpmc), Some(0.853_553_390_593_273_7));
    let sharp = "c o sharpSAT-TD\ns SATISFIABLE\nc s type wmc\nc s log10-estimate -1.2\nc s exact double prec-sci 6.25e-2\n";
    assert_eq!(parse_counter_output(sharp), Some(0.0625));
    let arb = "s SATISFIABLE\nc s type mc\nc s exact arb int 12\n";
    assert_eq!(parse_counter_output(arb), Some(12.0));
    assert_eq!(parse_counter_output("c d4\ns 0.5\n"), Some(0.5));
    assert_eq!(parse_counter_output("c preprocessing\ns UNSATISFIABLE\n"), Some(0.0));
    assert_eq!(parse_counter_output("s 1\nc s exact double float 0.25\ns 3\n"), Some(0.25));
    assert_eq!(parse_counter_output("c nothing to see\n"), None);
    assert_eq!(parse_counter_output("s SATISFIABLE\n"), None);
}

#[cfg(unix)]
fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
    use std::os::unix::fs::PermissionsExt;
    let p = write(dir, name, &format!("#!/bin/sh\n{body}\n"));
    fs::set_permissions(&p, fs::Permissions::from_mode(0o755)).unwrap();
    p
}

#[cfg(unix)]
#[test]
fn external_backend_contract() {
    let dir = tempfile::tempdir().unwrap();
    let mut f = WeightedCnf::new(1);
    f.add_clause(vec![1]);
    // checks it was handed a DIMACS file before answering
    let good = script(dir.path(), "good.sh", "head -1 \"$1\" | grep -q '^p cnf 1 1$' || exit 1\necho 's SATISFIABLE'\necho 'c s exact double float 0.75'");
    assert_eq!(count_with(&Backend::External(good), &f).unwrap(), 0.75);
    let unsat = script(dir.path(), "unsat.sh", "echo 's UNSATISFIABLE'; exit 20");
    assert_eq!(count_with(&Backend::External(unsat), &f).unwrap(), 0.0);
    let crash = script(dir.path(), "crash.sh", "echo boom >&2; exit 4");
    assert_eq!(count_with(&Backend::External(crash), &f).unwrap_err().exit_code(), 3);
    let silent = script(dir.path(), "silent.sh", "exit 0");
    assert_eq!(count_with(&Backend::External(silent), &f).unwrap_err().exit_code(), 3);
    let missing = Backend::External(dir.path().join("absent"));
    assert_eq!(count_with(&missing, &f).unwrap_err().exit_code(), 3);
}

fn qwmc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qwmc"))
}

#[test]
fn binary_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let worked = write(dir.path(), "worked.qasm", WORKED);

    let out = qwmc().args(["simulate", "--input"]).arg(&worked).args(["--measure", "q0=0", "--json"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["input", "n", "m", "measure", "measured_qubits", "vars", "clauses", "count", "probability", "backend", "timings"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert!((v["probability"].as_f64().unwrap() - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-8);

    let again = qwmc().args(["simulate", "--input"]).arg(&worked).args(["--measure", "q0=0", "--json"]).output().unwrap();
    let mut w: serde_json::Value = serde_json::from_slice(&again.stdout).unwrap();
    let mut v = v;
    v["timings"] = serde_json::Value::Null;
    w["timings"] = serde_json::Value::Null;
    assert_eq!(v, w);

    let out = qwmc().args(["oracle", "--input"]).arg(&worked).args(["--measure", "q0=0"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("0.85355339"));

    let cnf = dir.path().join("w.cnf");
    let out = qwmc().args(["encode", "--input"]).arg(&worked).arg("-o").arg(&cnf).output().unwrap();
    assert!(out.status.success());
    assert!(parse_dimacs(&fs::read_to_string(&cnf).unwrap()).is_ok());

    let out = qwmc().args(["bench", "--runs", "0"]).output().unwrap();
    assert!(out.status.success());

    let out = qwmc().args(["simulate", "--input"]).arg(dir.path().join("absent.qasm")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.qasm"));

    let hard = write(dir.path(), "hard.qasm", &common::random_circuit(4, 40, true, 1).to_qasm());
    let out = qwmc().args(["simulate", "--input"]).arg(&hard).env("QWMC_MAX_DECISIONS", "0").output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));

    let out = qwmc().args(["simulate", "--input"]).arg(&worked).args(["--backend", "external:/nonexistent/counter"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}
