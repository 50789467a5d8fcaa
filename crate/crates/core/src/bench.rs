//! Seeded random circuit families.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`, which is
//! platform independent; all draws go through `Rng::gen::<f64>()` and
//! `gen_range` so a seed fixes the circuit.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::oracle::Pauli;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    RatioRandom,
    PauliExp,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("gate ratios must be nonnegative and sum to 1")]
    BadRatios,
    #[error("ratio-random circuits need at least 2 qubits")]
    TooFewQubits,
    #[error("{0:?} cannot be drawn by the ratio-random family")]
    BadGate(GateKind),
    #[error("config is for the other circuit family")]
    WrongFamily,
    #[error("pauli-exp circuits need a positive T count and at least 1 qubit")]
    BadPauliExp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub family: Family,
    pub n: usize,
    /// Gate count for the ratio-random family.
    pub depth: usize,
    /// Number of Pauli gadgets for the pauli-exp family.
    pub t_count: usize,
    /// Draw probability per gate kind (ratio-random only). Rotation kinds get
    /// an angle uniform in `[0, 2π)`.
    pub ratios: Vec<(GateKind, f64)>,
    pub seed: u64,
}

/// CX, H, S, T at 10 %, 35 %, 35 %, 20 %.
pub fn default_ratios() -> Vec<(GateKind, f64)> {
    vec![
        (GateKind::CX, 0.10),
        (GateKind::H, 0.35),
        (GateKind::S, 0.35),
        (GateKind::T, 0.20),
    ]
}

/// The default mix with part of the H/S/T mass moved to rotations.
pub fn rotation_ratios() -> Vec<(GateKind, f64)> {
    vec![
        (GateKind::CX, 0.10),
        (GateKind::H, 0.25),
        (GateKind::S, 0.25),
        (GateKind::T, 0.10),
        (GateKind::RX, 0.10),
        (GateKind::RY, 0.10),
        (GateKind::RZ, 0.10),
    ]
}

impl BenchConfig {
    pub fn ratio_random(n: usize, depth: usize, seed: u64) -> Self {
        BenchConfig {
            family: Family::RatioRandom,
            n,
            depth,
            t_count: 0,
            ratios: default_ratios(),
            seed,
        }
    }

    pub fn pauli_exp(n: usize, t_count: usize, seed: u64) -> Self {
        BenchConfig {
            family: Family::PauliExp,
            n,
            depth: 0,
            t_count,
            ratios: Vec::new(),
            seed,
        }
    }

    pub fn with_ratios(mut self, ratios: Vec<(GateKind, f64)>) -> Self {
        self.ratios = ratios;
        self
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        match self.family {
            Family::RatioRandom => {
                if self.n < 2 {
                    return Err(BenchError::TooFewQubits);
                }
                let sum: f64 = self.ratios.iter().map(|r| r.1).sum();
                if self.ratios.iter().any(|r| r.1.is_nan() || r.1 < 0.0) || (sum - 1.0).abs() > 1e-9 {
                    return Err(BenchError::BadRatios);
                }
                if let Some(&(k, _)) = self.ratios.iter().find(|(k, _)| !k.is_core()) {
                    return Err(BenchError::BadGate(k));
                }
            }
            Family::PauliExp => {
                if self.t_count == 0 || self.n == 0 {
                    return Err(BenchError::BadPauliExp);
                }
            }
        }
        Ok(())
    }
}

/// Generates the circuit described by `cfg`.
pub fn generate(cfg: &BenchConfig) -> Result<Circuit, BenchError> {
    match cfg.family {
        Family::RatioRandom => random_clifford_t(cfg),
        Family::PauliExp => pauli_exponentiation_circuit(cfg),
    }
}

/// I.i.d. gates drawn from `cfg.ratios`; CX operands are a uniform ordered
/// pair of distinct qubits.
pub fn random_clifford_t(cfg: &BenchConfig) -> Result<Circuit, BenchError> {
    if cfg.family != Family::RatioRandom {
        return Err(BenchError::WrongFamily);
    }
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let mut c = Circuit::new(n);
    for _ in 0..cfg.depth {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut kind = cfg.ratios.last().map(|r| r.0).ok_or(BenchError::BadRatios)?;
        for &(k, p) in &cfg.ratios {
            acc += p;
            if u < acc {
                kind = k;
                break;
            }
        }
        let qubits = if kind.arity() == 2 {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            vec![a, b]
        } else {
            vec![rng.gen_range(0..n)]
        };
        let angle = kind.is_rotation().then(|| rng.gen_range(0.0..TAU));
        let g = Gate::from_parts(kind, &qubits, angle).expect("arity matches kind");
        c.push(g).expect("operands in range");
    }
    Ok(c)
}

/// Gates realizing `exp(-i (2k+1) π/4 P)` up to global phase: basis change
/// of every support qubit to Z, a CX ladder collecting the parity on the
/// last support qubit, `rz((2k+1) π/2)` there, then the inverse.
pub fn pauli_gadget(pauli: &[Pauli], k: u32) -> Vec<Gate> {
    let support: Vec<usize> = pauli
        .iter()
        .enumerate()
        .filter(|(_, p)| **p != Pauli::I)
        .map(|(q, _)| q)
        .collect();
    let Some(&pivot) = support.last() else {
        return Vec::new();
    };
    let mut pre = Vec::new();
    for &q in &support {
        match pauli[q] {
            Pauli::X => pre.push(Gate::H(q)),
            Pauli::Y => pre.extend([Gate::Sdg(q), Gate::H(q)]),
            _ => {}
        }
    }
    let ladder: Vec<Gate> = support.windows(2).map(|w| Gate::CX(w[0], w[1])).collect();

    let mut gates = pre.clone();
    gates.extend(ladder.iter().copied());
    gates.push(Gate::RZ(pivot, f64::from(2 * k + 1) * FRAC_PI_2));
    gates.extend(ladder.iter().rev().copied());
    for g in pre.iter().rev() {
        gates.push(match *g {
            Gate::Sdg(q) => Gate::S(q),
            other => other,
        });
    }
    gates
}

/// `t_count` gadgets, each on a uniform non-identity Pauli string over all
/// `n` qubits with `k` uniform in `{1, 2}`.
pub fn pauli_exponentiation_circuit(cfg: &BenchConfig) -> Result<Circuit, BenchError> {
    if cfg.family != Family::PauliExp {
        return Err(BenchError::WrongFamily);
    }
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut c = Circuit::new(cfg.n);
    for _ in 0..cfg.t_count {
        let pauli = loop {
            let p: Vec<Pauli> = (0..cfg.n).map(|_| Pauli::ALL[rng.gen_range(0..4)]).collect();
            if p.iter().any(|&l| l != Pauli::I) {
                break p;
            }
        };
        let k = rng.gen_range(1..=2u32);
        for g in pauli_gadget(&pauli, k) {
            c.push(g).expect("operands in range");
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_depth_is_empty() {
        let c = generate(&BenchConfig::ratio_random(3, 0, 1)).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn seeds_are_reproducible() {
        let cfg = BenchConfig::ratio_random(5, 200, 42).with_ratios(rotation_ratios());
        assert_eq!(generate(&cfg).unwrap().to_qasm(), generate(&cfg).unwrap().to_qasm());
        let cfg = BenchConfig::pauli_exp(4, 6, 9);
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        let other = BenchConfig::pauli_exp(4, 6, 10);
        assert_ne!(generate(&cfg).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = BenchConfig::ratio_random(3, 10, 0).with_ratios(vec![(GateKind::H, 0.5)]);
        assert_eq!(generate(&bad), Err(BenchError::BadRatios));
        let neg = BenchConfig::ratio_random(3, 10, 0).with_ratios(vec![(GateKind::H, 1.5), (GateKind::S, -0.5)]);
        assert_eq!(generate(&neg), Err(BenchError::BadRatios));
        assert_eq!(generate(&BenchConfig::ratio_random(1, 10, 0)), Err(BenchError::TooFewQubits));
        assert_eq!(generate(&BenchConfig::pauli_exp(3, 0, 0)), Err(BenchError::BadPauliExp));
    }

    #[test]
    fn gadget_count() {
        let c = generate(&BenchConfig::pauli_exp(5, 8, 3)).unwrap();
        assert_eq!(c.gates().iter().filter(|g| matches!(g, Gate::RZ(..))).count(), 8);
    }

    #[test]
    fn single_z_gadget() {
        assert_eq!(
            pauli_gadget(&[Pauli::Z], 1),
            vec![Gate::RZ(0, 3.0 * FRAC_PI_2)]
        );
    }
}
