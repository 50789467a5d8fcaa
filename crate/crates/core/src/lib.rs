//! Exact strong simulation of Clifford+T+rotation circuits.
//!
//! A circuit is compiled into a weighted CNF whose weighted model count is
//! the probability of a computational-basis measurement outcome. The
//! statevector module is an independent reference for small circuits.
//!
//! ```
//! use qwmc::{build, count, parse_qasm, probability_from_count, MeasurementSpec};
//!
//! let c = parse_qasm("OPENQASM 2.0; qreg q[2]; h q[0]; t q[0]; h q[0];").unwrap();
//! let spec = MeasurementSpec::single(0, false);
//! let enc = build(&c.lower(), &spec).unwrap();
//! let p = probability_from_count(count(&enc.cnf).unwrap().value, enc.measured).unwrap();
//! assert!((p - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
//! ```

pub mod bench;
pub mod circuit;
pub mod cli;
pub mod cnf;
pub mod encoder;
pub mod oracle;
pub mod wmc;

pub use circuit::{parse_qasm, Circuit, Gate, GateKind, MeasurementSpec};
pub use cnf::WeightedCnf;
pub use encoder::{build, probability_from_count, Encoding};
pub use wmc::{count, Counter, CounterConfig};
