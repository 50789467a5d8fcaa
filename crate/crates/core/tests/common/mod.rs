#![allow(dead_code)]

use qwmc::bench::{self, BenchConfig};
use qwmc::circuit::{Circuit, MeasurementSpec};
use qwmc::cnf::WeightedCnf;
use qwmc::encoder::{build, probability_from_count};
use qwmc::oracle::{measure_probability, simulate_statevector};
use qwmc::wmc::count;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Ratio-random circuit with `n` qubits and `m` gates, optionally mixing in
/// rotations with uniform angles.
pub fn random_circuit(n: usize, m: usize, rotations: bool, seed: u64) -> Circuit {
    let cfg = BenchConfig::ratio_random(n, m, seed);
    let cfg = if rotations { cfg.with_ratios(bench::rotation_ratios()) } else { cfg };
    bench::generate(&cfg).unwrap()
}

/// Random non-empty measured subset with random outcome bits.
pub fn random_spec(r: &mut impl Rng, n: usize) -> MeasurementSpec {
    loop {
        let mut s = MeasurementSpec::new();
        for q in 0..n {
            if r.gen_bool(0.5) {
                s.set(q, r.gen_bool(0.5));
            }
        }
        if !s.is_empty() {
            return s;
        }
    }
}

pub fn wmc_probability(c: &Circuit, spec: &MeasurementSpec) -> f64 {
    let enc = build(&c.lower(), spec).unwrap();
    probability_from_count(count(&enc.cnf).unwrap().value, enc.measured).unwrap()
}

pub fn oracle_probability(c: &Circuit, spec: &MeasurementSpec) -> f64 {
    measure_probability(&simulate_statevector(c).unwrap(), spec)
}

/// Random CNF over `vars` variables with clause widths 1..=4 and literal
/// weights drawn from `[-1, 1]`, a quarter of them forced to zero.
pub fn random_cnf(r: &mut impl Rng, vars: usize, clauses: usize) -> WeightedCnf {
    let mut f = WeightedCnf::new(vars);
    for _ in 0..clauses {
        let width = r.gen_range(1..=4.min(vars));
        let c = (0..width)
            .map(|_| {
                let v = r.gen_range(1..=vars) as i32;
                if r.gen_bool(0.5) { v } else { -v }
            })
            .collect();
        f.add_clause(c);
    }
    for v in 1..=vars as i32 {
        for lit in [v, -v] {
            match r.gen_range(0..4) {
                0 => f.set_weight(lit, 0.0),
                1 => {}
                _ => f.set_weight(lit, r.gen_range(-1.0..=1.0)),
            }
        }
    }
    f
}

use qwmc::circuit::{Gate, GateKind};
use qwmc::encoder::relation::{core_kinds, relation, BranchVar, Frame};
use qwmc::oracle::{conjugate_pauli, Pauli, PauliTerm};

pub fn letter(x: bool, z: bool) -> Pauli {
    match (x, z) {
        (false, false) => Pauli::I,
        (true, false) => Pauli::X,
        (false, true) => Pauli::Z,
        (true, true) => Pauli::Y,
    }
}

pub fn frame_term(f: &Frame, arity: usize, coeff: f64) -> PauliTerm {
    let letters = (0..arity).map(|q| letter(f.x[q], f.z[q])).collect();
    PauliTerm::new(if f.r { -coeff } else { coeff }, letters)
}

/// A representative gate of `kind` on qubits 0 (and 1).
pub fn sample_gate(kind: GateKind, angle: f64) -> Gate {
    let qubits: &[usize] = if kind.arity() == 2 { &[0, 1] } else { &[0] };
    Gate::from_parts(kind, qubits, kind.is_rotation().then_some(angle)).unwrap()
}

/// Compares every row of every core relation against `conjugate_pauli`.
/// Returns (rows checked, mismatching rows).
pub fn gate_table_check(angle: f64, reuse: bool) -> (usize, Vec<String>) {
    let mut checked = 0;
    let mut bad = Vec::new();
    for &kind in core_kinds() {
        let gate = sample_gate(kind, angle);
        let rel = relation(kind, reuse);
        for input in Frame::all(rel.arity) {
            checked += 1;
            let mut ours: Vec<PauliTerm> = rel
                .extensions(input)
                .into_iter()
                .map(|(out, branches)| {
                    let w: f64 = branches
                        .iter()
                        .map(|b| match b {
                            BranchVar::U => std::f64::consts::FRAC_1_SQRT_2,
                            BranchVar::U1 => angle.cos(),
                            BranchVar::U2 => angle.sin(),
                        })
                        .product();
                    frame_term(&out, rel.arity, w)
                })
                .collect();
            let mut theirs = conjugate_pauli(&gate, &frame_term(&input, rel.arity, 1.0)).unwrap();
            ours.sort_by(|a, b| a.letters.cmp(&b.letters));
            theirs.sort_by(|a, b| a.letters.cmp(&b.letters));
            let same = ours.len() == theirs.len()
                && ours.iter().zip(&theirs).all(|(a, b)| {
                    a.letters == b.letters
                        && a.coeff.signum() == b.coeff.signum()
                        && (a.coeff - b.coeff).abs() <= 1e-12
                });
            if !same {
                bad.push(format!("{kind:?} {input:?}: table {ours:?} vs conjugation {theirs:?}"));
            }
        }
    }
    (checked, bad)
}

use num_complex::Complex64;
use qwmc::oracle::circuit_unitary;

pub type Dense = Vec<Vec<Complex64>>;

pub fn unitary(n: usize, gates: Vec<Gate>) -> Dense {
    let cols = circuit_unitary(&Circuit::from_gates(n, gates).unwrap()).unwrap();
    let d = 1 << n;
    (0..d).map(|i| (0..d).map(|j| cols[j].amplitudes()[i]).collect()).collect()
}

pub fn pauli_dense(t: &PauliTerm) -> Dense {
    let d = 1 << t.letters.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            let mut v = Complex64::new(t.coeff, 0.0);
            for (q, p) in t.letters.iter().enumerate() {
                v *= p.matrix()[i >> q & 1][j >> q & 1];
            }
            *e = v;
        }
    }
    m
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn dagger(a: &Dense) -> Dense {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| a[j][i].conj()).collect()).collect()
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `a = e^{iφ} b` for some φ.
pub fn equal_up_to_phase(a: &Dense, b: &Dense) -> bool {
    let (i, j) = (0..a.len())
        .flat_map(|i| (0..a.len()).map(move |j| (i, j)))
        .max_by(|&(i, j), &(k, l)| b[i][j].norm().total_cmp(&b[k][l].norm()))
        .unwrap();
    let phase = a[i][j] / b[i][j];
    (phase.norm() - 1.0).abs() < 1e-12
        && max_diff(a, &b.iter().map(|r| r.iter().map(|x| x * phase).collect()).collect()) < 1e-12
}

