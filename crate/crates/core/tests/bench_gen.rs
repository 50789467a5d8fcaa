mod common;

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use qwmc::bench::{default_ratios, generate, pauli_gadget, BenchConfig, BenchError};
use qwmc::circuit::{parse_qasm, Gate, GateKind};
use qwmc::oracle::{Pauli, PauliTerm};

#[test]
fn gate_histogram_tracks_ratios() {
    let depth = 1000;
    let c = generate(&BenchConfig::ratio_random(4, depth, 7)).unwrap();
    assert_eq!(c.len(), depth);
    let mut hist: HashMap<GateKind, usize> = HashMap::new();
    for g in c.gates() {
        *hist.entry(g.kind()).or_default() += 1;
    }
    for (kind, p) in default_ratios() {
        let mean = p * depth as f64;
        let sd = (depth as f64 * p * (1.0 - p)).sqrt();
        let got = hist.get(&kind).copied().unwrap_or(0) as f64;
        assert!((got - mean).abs() <= 3.0 * sd, "{kind:?}: {got} vs {mean}±{}", 3.0 * sd);
    }
}

#[test]
fn generated_qasm_parses_back() {
    for seed in 0..10 {
        let c = generate(&BenchConfig::ratio_random(5, 80, seed).with_ratios(qwmc::bench::rotation_ratios())).unwrap();
        assert_eq!(parse_qasm(&c.to_qasm()).unwrap(), c);
        let p = generate(&BenchConfig::pauli_exp(5, 8, seed)).unwrap();
        assert_eq!(parse_qasm(&p.to_qasm()).unwrap(), p);
    }
}

#[test]
fn pauli_exp_has_one_rotation_per_gadget() {
    let c = generate(&BenchConfig::pauli_exp(5, 8, 1)).unwrap();
    assert_eq!(c.lower().gates().iter().filter(|g| g.kind().is_rotation()).count(), 8);
    assert_eq!(generate(&BenchConfig::ratio_random(4, 10, 0).with_ratios(vec![(GateKind::CZ, 1.0)])), Err(BenchError::BadGate(GateKind::CZ)));
}

/// Each gadget equals `exp(-i (2k+1) π/4 P)` up to a global phase.
#[test]
fn gadgets_exponentiate_their_pauli() {
    let n = 3;
    let mut idx = 0usize;
    for code in 1..4usize.pow(n as u32) {
        let letters: Vec<Pauli> = (0..n).map(|q| Pauli::ALL[code / 4usize.pow(q as u32) % 4]).collect();
        for k in [1u32, 2] {
            idx += 1;
            let phi = f64::from(2 * k + 1) * FRAC_PI_4;
            let p = common::pauli_dense(&PauliTerm::new(1.0, letters.clone()));
            let d = 1 << n;
            let want: common::Dense = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            let id = if i == j { phi.cos() } else { 0.0 };
                            Complex64::new(id, 0.0) - Complex64::i() * phi.sin() * p[i][j]
                        })
                        .collect()
                })
                .collect();
            let got = common::unitary(n, pauli_gadget(&letters, k));
            assert!(common::equal_up_to_phase(&got, &want), "{letters:?} k={k}");
        }
    }
    assert_eq!(idx, 126);
    assert!(pauli_gadget(&[Pauli::I, Pauli::I], 1).is_empty());
    assert!(matches!(pauli_gadget(&[Pauli::X], 1)[..], [Gate::H(0), Gate::RZ(0, _), Gate::H(0)]));
}
