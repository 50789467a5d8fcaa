//! H, CX, T, CX, H on two qubits: the probability of reading 0 on qubit 0
//! is (2 + √2)/4, both through the projector and through the Z_0
//! coefficient.

use qwmc::circuit::{Circuit, Gate, MeasurementSpec};
use qwmc::encoder::{build, build_z_selection, probability_from_count, probability_from_z_coefficient};
use qwmc::wmc::count;

fn main() {
    let c = Circuit::from_gates(2, vec![Gate::H(0), Gate::CX(0, 1), Gate::T(0), Gate::CX(0, 1), Gate::H(0)]).unwrap();

    let enc = build(&c, &MeasurementSpec::single(0, false)).unwrap();
    let res = count(&enc.cnf).unwrap();
    let p = probability_from_count(res.value, enc.measured).unwrap();
    println!("projector: {} vars, {} clauses, count {}, p = {p}", enc.cnf.var_count(), enc.cnf.clauses().len(), res.value);

    let z = build_z_selection(&c, 0).unwrap();
    let coeff = count(&z.cnf).unwrap().value;
    println!("Z_0 coefficient {coeff}, p = {}", probability_from_z_coefficient(coeff).unwrap());
    println!("expected        p = {}", (2.0 + 2f64.sqrt()) / 4.0);
}
