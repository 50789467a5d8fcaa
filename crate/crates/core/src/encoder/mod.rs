//! Compilation of a lowered circuit and a computational-basis measurement
//! into a weighted CNF whose weighted model count is `2^q` times the outcome
//! probability (`q` = number of measured qubits).
//!
//! Every satisfying assignment stands for one weighted Pauli string of the
//! final density operator: bits `x_j, z_j` give the letter on qubit `j`,
//! `r` gives the sign through `W(r) = -1`, and the branch variables of T and
//! rotation steps carry the `1/sqrt(2)`, `cos` and `sin` coefficients.

pub mod relation;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, MeasurementSpec};
use crate::cnf::{Clause, Lit, WeightedCnf};
use relation::{relation, BranchVar, GateRelation, OutputSource, Role};

pub use relation::Frame;

/// Acceptance slack for probabilities computed from a count.
pub const PROBABILITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error("gate `{0}` is not in the core set; lower the circuit first")]
    NotLowered(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("probability {value} outside [0, 1] beyond tolerance; encoder or counter bug")]
    ProbabilityOutOfRange { value: f64 },
}

/// Semantic meaning of an allocated CNF variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SemVar {
    X(usize),
    Z(usize),
    R,
    Branch(BranchVar),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Allocation {
    pub var: SemVar,
    pub step: usize,
    pub id: Lit,
}

/// Maps the current-step `x_j`, `z_j`, `r` to CNF ids and logs every
/// allocation. Ids are handed out once, in increasing order.
#[derive(Clone, Debug)]
pub struct VarRegistry {
    x: Vec<Lit>,
    z: Vec<Lit>,
    r: Lit,
    log: Vec<Allocation>,
}

impl VarRegistry {
    /// Allocates `x_j^0, z_j^0` (interleaved per qubit) and then `r^0`.
    pub fn new(n: usize) -> Self {
        let mut reg = VarRegistry {
            x: Vec::with_capacity(n),
            z: Vec::with_capacity(n),
            r: 0,
            log: Vec::new(),
        };
        for j in 0..n {
            let x = reg.alloc(SemVar::X(j), 0);
            let z = reg.alloc(SemVar::Z(j), 0);
            reg.x.push(x);
            reg.z.push(z);
        }
        reg.r = reg.alloc(SemVar::R, 0);
        reg
    }

    fn alloc(&mut self, var: SemVar, step: usize) -> Lit {
        let id = self.log.len() as Lit + 1;
        self.log.push(Allocation { var, step, id });
        id
    }

    pub fn x(&self, j: usize) -> Lit {
        self.x[j]
    }

    pub fn z(&self, j: usize) -> Lit {
        self.z[j]
    }

    pub fn r(&self) -> Lit {
        self.r
    }

    pub fn allocations(&self) -> &[Allocation] {
        &self.log
    }

    pub fn var_count(&self) -> usize {
        self.log.len()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EncoderOptions {
    /// Allocate new variables for every qubit at every step and tie the
    /// untouched ones with equality clauses instead of reusing ids.
    pub fresh_variables: bool,
}

/// `(cos θ, sin θ)`, exact when θ is a multiple of π/2 up to rounding.
/// `cos(3π/2)` in floating point is about `-1.8e-16` rather than 0, and an
/// exact zero lets the counter drop the branch.
pub fn cos_sin(theta: f64) -> (f64, f64) {
    let k = (theta / FRAC_PI_2).round();
    if (theta - k * FRAC_PI_2).abs() <= 4.0 * f64::EPSILON * theta.abs().max(1.0) {
        match (k as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        (theta.cos(), theta.sin())
    }
}

/// Incremental builder: `encode_init`, then one `encode_gate` per gate, then
/// a measurement constraint, then [`Encoder::finish`].
#[derive(Clone, Debug)]
pub struct Encoder {
    n: usize,
    opts: EncoderOptions,
    reg: VarRegistry,
    cnf: WeightedCnf,
    step: usize,
}

impl Encoder {
    pub fn new(n: usize, opts: EncoderOptions) -> Self {
        let reg = VarRegistry::new(n);
        let cnf = WeightedCnf::new(reg.var_count());
        Encoder {
            n,
            opts,
            reg,
            cnf,
            step: 0,
        }
    }

    pub fn registry(&self) -> &VarRegistry {
        &self.reg
    }

    pub fn cnf(&self) -> &WeightedCnf {
        &self.cnf
    }

    /// Number of gates encoded so far.
    pub fn step(&self) -> usize {
        self.step
    }

    fn push(&mut self, clause: Clause, added: &mut Vec<Clause>) {
        self.cnf.add_clause(clause.clone());
        added.push(clause);
    }

    fn alloc(&mut self, var: SemVar, step: usize) -> Lit {
        let id = self.reg.alloc(var, step);
        self.cnf.ensure_vars(self.reg.var_count());
        id
    }

    /// `¬r^0 ∧ ⋀_j ¬x_j^0`; the `z_j^0` stay free, so the `2^n` models are
    /// the stabilizer group of `|0...0>`.
    pub fn encode_init(&mut self) -> Vec<Clause> {
        let mut added = Vec::new();
        self.push(vec![-self.reg.r], &mut added);
        for j in 0..self.n {
            self.push(vec![-self.reg.x[j]], &mut added);
        }
        added
    }

    /// Adds the transition clauses of one core gate and advances the step.
    pub fn encode_gate(&mut self, gate: &Gate) -> Result<Vec<Clause>, EncodeError> {
        let kind = gate.kind();
        if !kind.is_core() {
            return Err(EncodeError::NotLowered(gate.to_string()));
        }
        let qubits = gate.qubits();
        for &q in &qubits {
            if q >= self.n {
                return Err(EncodeError::QubitOutOfRange { qubit: q, n: self.n });
            }
        }
        let rel: &GateRelation = relation(kind, !self.opts.fresh_variables);
        let t = self.step;
        let mut ids: Vec<Lit> = Vec::with_capacity(rel.roles.len());
        for role in &rel.roles {
            let id = match *role {
                Role::InX(i) => self.reg.x[qubits[i]],
                Role::InZ(i) => self.reg.z[qubits[i]],
                Role::InR => self.reg.r,
                Role::OutX(i) => self.alloc(SemVar::X(qubits[i]), t + 1),
                Role::OutZ(i) => self.alloc(SemVar::Z(qubits[i]), t + 1),
                Role::OutR => self.alloc(SemVar::R, t + 1),
                Role::Branch(b) => self.alloc(SemVar::Branch(b), t),
            };
            ids.push(id);
        }

        let mut added = Vec::new();
        for c in &rel.clauses {
            let clause = c
                .iter()
                .map(|&(pos, pol)| if pol { ids[pos] } else { -ids[pos] })
                .collect();
            self.push(clause, &mut added);
        }

        for (pos, role) in rel.roles.iter().enumerate() {
            if let Role::Branch(b) = role {
                let w = match (b, gate.angle()) {
                    (BranchVar::U, _) => FRAC_1_SQRT_2,
                    (BranchVar::U1, Some(a)) => cos_sin(a).0,
                    (BranchVar::U2, Some(a)) => cos_sin(a).1,
                    _ => unreachable!("rotation branch without angle"),
                };
                self.cnf.set_weight(ids[pos], w);
            }
        }

        let resolve = |src: OutputSource, ids: &[Lit]| -> Lit {
            match src {
                OutputSource::Fresh(p) => ids[p],
                OutputSource::Reused(role) => ids[rel.roles.iter().position(|r| *r == role).unwrap()],
            }
        };
        let touched = qubits.clone();
        for (i, &q) in qubits.iter().enumerate() {
            self.reg.x[q] = resolve(rel.output_x(i), &ids);
            self.reg.z[q] = resolve(rel.output_z(i), &ids);
        }
        self.reg.r = resolve(rel.output_r(), &ids);

        if self.opts.fresh_variables {
            for j in (0..self.n).filter(|j| !touched.contains(j)) {
                let (ox, oz) = (self.reg.x[j], self.reg.z[j]);
                let nx = self.alloc(SemVar::X(j), t + 1);
                let nz = self.alloc(SemVar::Z(j), t + 1);
                for (o, n) in [(ox, nx), (oz, nz)] {
                    self.push(vec![-o, n], &mut added);
                    self.push(vec![o, -n], &mut added);
                }
                self.reg.x[j] = nx;
                self.reg.z[j] = nz;
            }
        }
        self.step += 1;
        Ok(added)
    }

    /// Projector `⊗_{q measured} (I+Z)/2 ⊗ I` on the final step: measured
    /// qubits must carry `I` or `Z` (`¬x`), unmeasured ones `I` (`¬x ∧ ¬z`)
    /// because every other letter is traceless. Outcome bits are ignored
    /// here; [`build`] turns outcome 1 into an X gate beforehand.
    pub fn encode_measurement(&mut self, spec: &MeasurementSpec) -> Result<Vec<Clause>, EncodeError> {
        spec.validate(self.n)?;
        let mut added = Vec::new();
        for j in 0..self.n {
            self.push(vec![-self.reg.x[j]], &mut added);
            if spec.outcome(j).is_none() {
                self.push(vec![-self.reg.z[j]], &mut added);
            }
        }
        Ok(added)
    }

    /// Selects exactly the string `Z_k` on the final step; the count is then
    /// the coefficient of `Z_k`, and `p(k = 0) = 1/2 + count/2`.
    pub fn encode_z_selection(&mut self, k: usize) -> Result<Vec<Clause>, EncodeError> {
        if k >= self.n {
            return Err(EncodeError::QubitOutOfRange { qubit: k, n: self.n });
        }
        let mut added = Vec::new();
        for j in 0..self.n {
            self.push(vec![-self.reg.x[j]], &mut added);
            let z = self.reg.z[j];
            self.push(vec![if j == k { z } else { -z }], &mut added);
        }
        Ok(added)
    }

    /// Weights the final sign variable and returns the formula.
    pub fn finish(mut self, measured: usize) -> Encoding {
        self.cnf.set_weight(self.reg.r, -1.0);
        self.cnf.set_weight(-self.reg.r, 1.0);
        Encoding {
            final_x: self.reg.x.clone(),
            final_z: self.reg.z.clone(),
            final_r: self.reg.r,
            steps: self.step,
            measured,
            cnf: self.cnf,
            registry: self.reg,
        }
    }
}

/// A finished weighted CNF with the ids of the final-step variables.
#[derive(Clone, Debug)]
pub struct Encoding {
    pub cnf: WeightedCnf,
    /// Number of measured qubits `q`.
    pub measured: usize,
    /// Gates encoded, including X gates added for outcome bits.
    pub steps: usize,
    pub final_x: Vec<Lit>,
    pub final_z: Vec<Lit>,
    pub final_r: Lit,
    pub registry: VarRegistry,
}

fn encode_circuit(circuit: &Circuit, opts: EncoderOptions) -> Result<Encoder, EncodeError> {
    let mut enc = Encoder::new(circuit.num_qubits(), opts);
    enc.encode_init();
    for g in circuit.gates() {
        enc.encode_gate(g)?;
    }
    Ok(enc)
}

/// `F_init ∧ gates ∧ measurement` for a lowered circuit.
pub fn build(circuit: &Circuit, spec: &MeasurementSpec) -> Result<Encoding, EncodeError> {
    build_with(circuit, spec, EncoderOptions::default())
}

pub fn build_with(
    circuit: &Circuit,
    spec: &MeasurementSpec,
    opts: EncoderOptions,
) -> Result<Encoding, EncodeError> {
    spec.validate(circuit.num_qubits())?;
    let mut enc = encode_circuit(circuit, opts)?;
    // X maps (I-Z)/2 onto (I+Z)/2
    for (q, bit) in spec.iter() {
        if bit {
            enc.encode_gate(&Gate::X(q))?;
        }
    }
    enc.encode_measurement(spec)?;
    Ok(enc.finish(spec.len()))
}

/// `F_C` alone: its weighted models are the Pauli expansion of
/// `2^n |psi><psi|`.
pub fn build_state(circuit: &Circuit, opts: EncoderOptions) -> Result<Encoding, EncodeError> {
    Ok(encode_circuit(circuit, opts)?.finish(0))
}

/// `F_C` plus the exact `Z_k` selection.
pub fn build_z_selection(circuit: &Circuit, k: usize) -> Result<Encoding, EncodeError> {
    let mut enc = encode_circuit(circuit, EncoderOptions::default())?;
    enc.encode_z_selection(k)?;
    Ok(enc.finish(1))
}

/// `count / 2^q`, clamped to `[0, 1]`; values further than
/// [`PROBABILITY_TOLERANCE`] outside the interval are an error.
pub fn probability_from_count(count: f64, measured: usize) -> Result<f64, EncodeError> {
    let p = count / 2f64.powi(measured as i32);
    if !(-PROBABILITY_TOLERANCE..=1.0 + PROBABILITY_TOLERANCE).contains(&p) {
        return Err(EncodeError::ProbabilityOutOfRange { value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Probability of outcome 0 on qubit `k` from the `Z_k` coefficient.
pub fn probability_from_z_coefficient(coeff: f64) -> Result<f64, EncodeError> {
    probability_from_count(1.0 + coeff, 1)
}

/// Weighted DIMACS text of a formula.
pub fn emit_dimacs(f: &WeightedCnf) -> String {
    f.to_dimacs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_clauses() {
        let mut e = Encoder::new(2, EncoderOptions::default());
        let c = e.encode_init();
        // ids: x0=1 z0=2 x1=3 z1=4 r=5
        assert_eq!(c, vec![vec![-5], vec![-1], vec![-3]]);
    }

    #[test]
    fn measurement_clauses() {
        let mut e = Encoder::new(2, EncoderOptions::default());
        e.encode_init();
        let c = e.encode_measurement(&MeasurementSpec::single(0, false)).unwrap();
        assert_eq!(c, vec![vec![-1], vec![-3], vec![-4]]);
        let c = e.encode_measurement(&MeasurementSpec::all(2, false)).unwrap();
        assert_eq!(c, vec![vec![-1], vec![-3]]);
        let c = e.encode_z_selection(0).unwrap();
        assert_eq!(c, vec![vec![-1], vec![2], vec![-3], vec![-4]]);
        assert!(e.encode_measurement(&MeasurementSpec::single(2, false)).is_err());
    }

    #[test]
    fn hadamard_reuses_ids() {
        let mut e = Encoder::new(1, EncoderOptions::default());
        e.encode_init();
        let (x, z) = (e.registry().x(0), e.registry().z(0));
        e.encode_gate(&Gate::H(0)).unwrap();
        assert_eq!(e.registry().x(0), z);
        assert_eq!(e.registry().z(0), x);
        assert_eq!(e.registry().var_count(), 4);
    }

    #[test]
    fn derived_gate_rejected() {
        let mut e = Encoder::new(1, EncoderOptions::default());
        assert!(matches!(e.encode_gate(&Gate::Tdg(0)), Err(EncodeError::NotLowered(_))));
        assert!(matches!(
            e.encode_gate(&Gate::H(3)),
            Err(EncodeError::QubitOutOfRange { qubit: 3, n: 1 })
        ));
    }

    #[test]
    fn weights_only_on_final_sign_and_branches() {
        let c = Circuit::from_gates(2, vec![Gate::H(0), Gate::T(0), Gate::RX(1, 0.4), Gate::CX(0, 1)]).unwrap();
        let e = build(&c, &MeasurementSpec::all(2, false)).unwrap();
        let weighted = e.cnf.weighted_literals();
        let t_u = e
            .registry
            .allocations()
            .iter()
            .find(|a| a.var == SemVar::Branch(BranchVar::U))
            .unwrap()
            .id;
        assert!(weighted.contains(&(t_u, FRAC_1_SQRT_2)));
        assert!(weighted.contains(&(e.final_r, -1.0)));
        assert_eq!(weighted.len(), 4);
    }

    #[test]
    fn probability_conversion() {
        assert_eq!(probability_from_count(2.0, 1).unwrap(), 1.0);
        assert_eq!(probability_from_count(2.0, 2).unwrap(), 0.5);
        assert_eq!(probability_from_count(-1e-10, 0).unwrap(), 0.0);
        assert!(probability_from_count(1.1, 0).is_err());
        assert!(probability_from_count(-0.5, 0).is_err());
        let p = probability_from_count(1.0 + FRAC_1_SQRT_2, 1).unwrap();
        assert!((p - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn build_is_deterministic() {
        let c = Circuit::from_gates(3, vec![Gate::H(0), Gate::CX(0, 2), Gate::RY(1, 1.0), Gate::T(2)]).unwrap();
        let s = MeasurementSpec::single(2, true);
        assert_eq!(build(&c, &s).unwrap().cnf, build(&c, &s).unwrap().cnf);
    }

    #[test]
    fn quarter_turns_are_exact() {
        use std::f64::consts::PI;
        assert_eq!(cos_sin(1.5 * PI), (0.0, -1.0));
        assert_eq!(cos_sin(2.5 * PI), (0.0, 1.0));
        assert_eq!(cos_sin(-PI), (-1.0, 0.0));
        assert_eq!(cos_sin(0.0), (1.0, 0.0));
        let (c, s) = cos_sin(0.3);
        assert_eq!((c, s), (0.3f64.cos(), 0.3f64.sin()));
        let (c, _) = cos_sin(FRAC_PI_2 + 1e-9);
        assert!(c != 0.0);
    }
}
