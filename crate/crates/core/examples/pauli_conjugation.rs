//! Heisenberg-picture expansion of Z on qubit 0 through a small circuit,
//! and the same coefficients read off the state formula.

use qwmc::circuit::{Circuit, Gate};
use qwmc::encoder::{build_state, EncoderOptions};
use qwmc::oracle::{conjugate_circuit, Pauli, PauliTerm};
use qwmc::wmc::count;

fn main() {
    let c = Circuit::from_gates(2, vec![Gate::H(0), Gate::T(0), Gate::CX(0, 1), Gate::RX(1, 0.4)]).unwrap();
    let terms = conjugate_circuit(&c, &[PauliTerm::single(2, 0, Pauli::Z)]).unwrap();
    println!("U Z_0 U† =");
    for t in &terms {
        println!("  {t}");
    }

    // the weight of the models ending in P is <psi|P|psi>
    let enc = build_state(&c, EncoderOptions::default()).unwrap();
    for letters in [[Pauli::X, Pauli::I], [Pauli::Y, Pauli::Z], [Pauli::X, Pauli::Y]] {
        let mut f = enc.cnf.clone();
        for (j, p) in letters.iter().enumerate() {
            let (x, z) = match p {
                Pauli::I => (false, false),
                Pauli::X => (true, false),
                Pauli::Z => (false, true),
                Pauli::Y => (true, true),
            };
            f.add_clause(vec![if x { enc.final_x[j] } else { -enc.final_x[j] }]);
            f.add_clause(vec![if z { enc.final_z[j] } else { -enc.final_z[j] }]);
        }
        let s: String = letters.iter().map(|p| p.symbol()).collect();
        println!("<{s}> = {:.12}", count(&f).unwrap().value);
    }
}
