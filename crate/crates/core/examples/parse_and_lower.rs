//! Parse a QASM program and lower derived gates to the encodable set.

use qwmc::parse_qasm;

const SRC: &str = r#"
OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
h q[0];
sdg q[1];
tdg q[2];
cz q[0],q[1];
swap q[1],q[2];
rz(-3*pi/8) q[0];
"#;

fn main() {
    let c = parse_qasm(SRC).expect("valid program");
    println!("parsed {} gates on {} qubits:", c.len(), c.num_qubits());
    for g in c.gates() {
        println!("  {g}");
    }
    let lowered = c.lower();
    println!("lowered to {} gates:", lowered.len());
    print!("{}", lowered.to_qasm());

    match parse_qasm("OPENQASM 2.0;\nqreg q[1];\nccx q[0],q[0],q[0];\n") {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}
