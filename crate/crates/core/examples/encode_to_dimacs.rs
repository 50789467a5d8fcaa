//! Build the weighted CNF for a measurement and print it as DIMACS.
//!
//! `cargo run --example encode_to_dimacs -- [file.qasm] [measure]`

use std::env;
use std::fs;

use qwmc::{build, parse_qasm, MeasurementSpec};

fn main() {
    let args: Vec<String> = env::args().skip(1).collect();
    let path = args.first().map(String::as_str).unwrap_or(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/worked.qasm"));
    let measure = args.get(1).map(String::as_str).unwrap_or("q0=0");
    let c = parse_qasm(&fs::read_to_string(path).expect("readable file")).expect("valid QASM").lower();
    let spec = MeasurementSpec::parse(measure, c.num_qubits()).expect("valid measurement");
    let enc = build(&c, &spec).unwrap();
    eprintln!("{path}: n = {}, m = {}, measure {spec}", c.num_qubits(), c.len());
    print!("{}", enc.cnf.to_dimacs());
}
