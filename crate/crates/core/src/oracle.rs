//! Reference semantics: dense statevector simulation and weighted Pauli
//! conjugation by lookup tables.
//!
//! Basis-state indices are little-endian: qubit 0 is the least significant
//! bit. Global phase is never compared.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, Gate, MeasurementSpec};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{n} qubits exceeds the statevector limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("gate `{0}` has no conjugation table; lower the circuit first")]
    UnsupportedGate(String),
    #[error("Pauli term has {got} letters, expected {want}")]
    LengthMismatch { got: usize, want: usize },
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

type Mat2 = [[Complex64; 2]; 2];

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Exact 2x2 matrix of a single-qubit gate.
pub fn single_qubit_matrix(gate: &Gate) -> Option<Mat2> {
    let h = re(FRAC_1_SQRT_2);
    Some(match *gate {
        Gate::H(_) => [[h, h], [h, -h]],
        Gate::S(_) => [[ONE, ZERO], [ZERO, I]],
        Gate::Sdg(_) => [[ONE, ZERO], [ZERO, -I]],
        Gate::T(_) => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, FRAC_PI_4)]],
        Gate::Tdg(_) => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, -FRAC_PI_4)]],
        Gate::X(_) => [[ZERO, ONE], [ONE, ZERO]],
        Gate::Y(_) => [[ZERO, -I], [I, ZERO]],
        Gate::Z(_) => [[ONE, ZERO], [ZERO, -ONE]],
        Gate::RX(_, t) => {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            [[re(c), -I * s], [-I * s, re(c)]]
        }
        Gate::RY(_, t) => {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            [[re(c), re(-s)], [re(s), re(c)]]
        }
        Gate::RZ(_, t) => [
            [Complex64::from_polar(1.0, -t / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, t / 2.0)],
        ],
        Gate::CX(..) | Gate::CZ(..) | Gate::Swap(..) => return None,
    })
}

/// Dense `2^n` amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self, OracleError> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, OracleError> {
        if n > MAX_QUBITS {
            return Err(OracleError::TooManyQubits { n, max: MAX_QUBITS });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(Statevector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn apply_matrix(&mut self, q: usize, m: &Mat2) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Applies any gate, derived ones included, with its exact matrix.
    pub fn apply(&mut self, gate: &Gate) {
        match *gate {
            Gate::CX(c, t) => {
                let (cb, tb) = (1 << c, 1 << t);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            Gate::CZ(a, b) => {
                let mask = (1 << a) | (1 << b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Swap(a, b) => {
                let (ab, bb) = (1 << a, 1 << b);
                for i in 0..self.amps.len() {
                    if i & ab != 0 && i & bb == 0 {
                        self.amps.swap(i, i ^ ab ^ bb);
                    }
                }
            }
            ref g => {
                let m = single_qubit_matrix(g).expect("single-qubit gate");
                self.apply_matrix(g.qubits()[0], &m);
            }
        }
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Runs `circuit` on `|0...0>`.
pub fn simulate_statevector(circuit: &Circuit) -> Result<Statevector, OracleError> {
    let mut psi = Statevector::zero(circuit.num_qubits())?;
    for g in circuit.gates() {
        psi.apply(g);
    }
    Ok(psi)
}

/// Unitary of `circuit` as a list of columns (`columns[k] = U|k>`).
pub fn circuit_unitary(circuit: &Circuit) -> Result<Vec<Statevector>, OracleError> {
    let n = circuit.num_qubits();
    if n > 12 {
        return Err(OracleError::TooManyQubits { n, max: 12 });
    }
    (0..1usize << n)
        .map(|k| {
            let mut psi = Statevector::basis(n, k)?;
            for g in circuit.gates() {
                psi.apply(g);
            }
            Ok(psi)
        })
        .collect()
}

/// Probability that the measured qubits show the requested outcome bits.
pub fn measure_probability(state: &Statevector, spec: &MeasurementSpec) -> f64 {
    let (mut mask, mut want) = (0usize, 0usize);
    for (q, b) in spec.iter() {
        mask |= 1 << q;
        if b {
            want |= 1 << q;
        }
    }
    state
        .amps
        .iter()
        .enumerate()
        .filter(|(i, _)| i & mask == want)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Product `self * other` as `(i^k, letter)`.
    pub fn times(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Real-weighted Pauli string `coeff * P_0 ⊗ ... ⊗ P_{n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub letters: Vec<Pauli>,
}

impl PauliTerm {
    pub fn new(coeff: f64, letters: Vec<Pauli>) -> Self {
        PauliTerm { coeff, letters }
    }

    pub fn identity(n: usize) -> Self {
        PauliTerm::new(1.0, vec![Pauli::I; n])
    }

    /// A single non-identity letter at `qubit`.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut t = Self::identity(n);
        t.letters[qubit] = p;
        t
    }

    /// Parses strings like `"XIZ"` (qubit 0 first).
    pub fn from_str_letters(coeff: f64, s: &str) -> Option<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'I' => Some(Pauli::I),
                'X' => Some(Pauli::X),
                'Y' => Some(Pauli::Y),
                'Z' => Some(Pauli::Z),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(PauliTerm::new(coeff, letters))
    }

    fn scaled(&self, c: f64, q: usize, p: Pauli) -> PauliTerm {
        let mut t = PauliTerm::new(self.coeff * c, self.letters.clone());
        t.letters[q] = p;
        t
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.letters.iter().map(|p| p.symbol()).collect();
        write!(f, "{:+}*{s}", self.coeff)
    }
}

/// Image `U P U†` of a single letter under a Clifford, as (sign, letter).
fn clifford_letter(gate: &Gate, p: Pauli) -> (f64, Pauli) {
    use Pauli::*;
    match (gate, p) {
        (_, I) => (1.0, I),
        (Gate::H(_), X) => (1.0, Z),
        (Gate::H(_), Y) => (-1.0, Y),
        (Gate::H(_), Z) => (1.0, X),
        (Gate::S(_), X) => (1.0, Y),
        (Gate::S(_), Y) => (-1.0, X),
        (Gate::S(_), Z) => (1.0, Z),
        // conjugating by a Pauli flips every anticommuting letter
        (Gate::X(_), q) => (if q == X { 1.0 } else { -1.0 }, q),
        (Gate::Y(_), q) => (if q == Y { 1.0 } else { -1.0 }, q),
        (Gate::Z(_), q) => (if q == Z { 1.0 } else { -1.0 }, q),
        _ => unreachable!("not a single-qubit Clifford"),
    }
}

/// CX images of the single-letter generators on control and target.
fn cx_image(letter: Pauli, on_control: bool) -> [Pauli; 2] {
    use Pauli::*;
    match (on_control, letter) {
        (_, I) => [I, I],
        (true, X) => [X, X],
        (true, Y) => [Y, X],
        (true, Z) => [Z, I],
        (false, X) => [I, X],
        (false, Y) => [Z, Y],
        (false, Z) => [Z, Z],
    }
}

/// Conjugates `term` by a core gate: returns the terms of `U term U†`.
///
/// Clifford gates yield one term; T and the rotations yield one or two.
pub fn conjugate_pauli(gate: &Gate, term: &PauliTerm) -> Result<Vec<PauliTerm>, OracleError> {
    use Pauli::*;
    let out = match *gate {
        Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => {
            let (s, p) = clifford_letter(gate, term.letters[q]);
            vec![term.scaled(s, q, p)]
        }
        Gate::CX(c, t) => {
            let a = cx_image(term.letters[c], true);
            let b = cx_image(term.letters[t], false);
            let (k0, pc) = a[0].times(b[0]);
            let (k1, pt) = a[1].times(b[1]);
            // images of Hermitian strings are Hermitian, so the phase is ±1
            let sign = match (k0 + k1) % 4 {
                0 => 1.0,
                2 => -1.0,
                _ => unreachable!("non-Hermitian CX image"),
            };
            let mut r = term.scaled(sign, c, pc);
            r.letters[t] = pt;
            vec![r]
        }
        Gate::T(q) => {
            let h = FRAC_1_SQRT_2;
            match term.letters[q] {
                X => vec![term.scaled(h, q, X), term.scaled(h, q, Y)],
                Y => vec![term.scaled(h, q, Y), term.scaled(-h, q, X)],
                _ => vec![term.clone()],
            }
        }
        Gate::RX(q, th) => {
            let (c, s) = (th.cos(), th.sin());
            match term.letters[q] {
                Y => vec![term.scaled(c, q, Y), term.scaled(s, q, Z)],
                Z => vec![term.scaled(c, q, Z), term.scaled(-s, q, Y)],
                _ => vec![term.clone()],
            }
        }
        Gate::RY(q, th) => {
            let (c, s) = (th.cos(), th.sin());
            match term.letters[q] {
                X => vec![term.scaled(c, q, X), term.scaled(-s, q, Z)],
                Z => vec![term.scaled(c, q, Z), term.scaled(s, q, X)],
                _ => vec![term.clone()],
            }
        }
        Gate::RZ(q, th) => {
            let (c, s) = (th.cos(), th.sin());
            match term.letters[q] {
                X => vec![term.scaled(c, q, X), term.scaled(s, q, Y)],
                Y => vec![term.scaled(c, q, Y), term.scaled(-s, q, X)],
                _ => vec![term.clone()],
            }
        }
        Gate::Sdg(_) | Gate::Tdg(_) | Gate::CZ(..) | Gate::Swap(..) => {
            return Err(OracleError::UnsupportedGate(gate.to_string()))
        }
    };
    Ok(out)
}

/// Pushes a weighted Pauli sum through every gate of a lowered circuit,
/// merging equal strings and dropping zero coefficients. Output is sorted
/// by letters.
pub fn conjugate_circuit(circuit: &Circuit, terms: &[PauliTerm]) -> Result<Vec<PauliTerm>, OracleError> {
    let n = circuit.num_qubits();
    for t in terms {
        if t.letters.len() != n {
            return Err(OracleError::LengthMismatch {
                got: t.letters.len(),
                want: n,
            });
        }
    }
    let mut cur: Vec<PauliTerm> = terms.to_vec();
    for g in circuit.gates() {
        let mut acc: HashMap<Vec<Pauli>, f64> = HashMap::new();
        for t in &cur {
            for r in conjugate_pauli(g, t)? {
                *acc.entry(r.letters).or_insert(0.0) += r.coeff;
            }
        }
        cur = acc
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(l, c)| PauliTerm::new(c, l))
            .collect();
    }
    cur.sort_by(|a, b| a.letters.cmp(&b.letters));
    Ok(cur)
}

/// `coeff * <psi| P |psi>`.
pub fn pauli_expectation(state: &Statevector, term: &PauliTerm) -> Result<f64, OracleError> {
    if term.letters.len() != state.n {
        return Err(OracleError::LengthMismatch {
            got: term.letters.len(),
            want: state.n,
        });
    }
    let mut applied = state.clone();
    for (q, p) in term.letters.iter().enumerate() {
        if *p != Pauli::I {
            applied.apply_matrix(q, &p.matrix());
        }
    }
    Ok(term.coeff * state.inner(&applied).re)
}
