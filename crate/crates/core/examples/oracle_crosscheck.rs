//! Random circuits with rotations: counter against statevector.

use qwmc::bench::{generate, rotation_ratios, BenchConfig};
use qwmc::oracle::{measure_probability, simulate_statevector};
use qwmc::{build, count, probability_from_count, MeasurementSpec};

fn main() {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let c = generate(&BenchConfig::ratio_random(5, 40, seed).with_ratios(rotation_ratios())).unwrap();
        let spec = MeasurementSpec::new().with(0, false).with(3, true);
        let enc = build(&c, &spec).unwrap();
        let p = probability_from_count(count(&enc.cnf).unwrap().value, enc.measured).unwrap();
        let q = measure_probability(&simulate_statevector(&c).unwrap(), &spec);
        worst = worst.max((p - q).abs());
        println!("seed {seed:2}: wmc {p:.12}  statevector {q:.12}");
    }
    println!("max difference {worst:e}");
}
