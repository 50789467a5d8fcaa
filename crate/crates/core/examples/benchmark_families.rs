//! The two seeded circuit families and how their formulas grow.

use std::time::Instant;

use qwmc::bench::{generate, BenchConfig};
use qwmc::{build, count, MeasurementSpec};

fn main() {
    println!("ratio-random, n = 50");
    for depth in [1000, 2000, 4000, 8000] {
        let c = generate(&BenchConfig::ratio_random(50, depth, 1)).unwrap();
        let t = Instant::now();
        let enc = build(&c, &MeasurementSpec::all(50, false)).unwrap();
        println!(
            "  m = {depth:5}: {:6} vars, {:7} clauses, encoded in {:.1} ms",
            enc.cnf.var_count(),
            enc.cnf.clauses().len(),
            t.elapsed().as_secs_f64() * 1e3
        );
    }

    println!("pauli-exp, n = 5");
    for t_count in [2, 4, 8] {
        let c = generate(&BenchConfig::pauli_exp(5, t_count, 3)).unwrap();
        let enc = build(&c.lower(), &MeasurementSpec::all(5, false)).unwrap();
        let t = Instant::now();
        let res = count(&enc.cnf).unwrap();
        println!(
            "  {t_count} gadgets, {} gates: p(00000) = {:.6}, {} decisions in {:.1} ms",
            c.len(),
            res.value / 32.0,
            res.stats.decisions,
            t.elapsed().as_secs_f64() * 1e3
        );
    }
    print!("first generated circuit:\n{}", generate(&BenchConfig::pauli_exp(3, 1, 0)).unwrap().to_qasm());
}
