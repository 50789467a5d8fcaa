//! Count a weighted DIMACS file with the built-in counter, and with brute
//! force when it is small enough.
//!
//! `cargo run --example count_dimacs -- formula.cnf`

use std::env;
use std::fs;

use qwmc::wmc::{count, count_bruteforce, parse_dimacs, BRUTEFORCE_MAX_VARS};

const DEFAULT: &str = "p cnf 3 2\nc p weight 1 -0.5 0\nc p weight -1 0.3333333333333333 0\nc p weight 2 0.25 0\nc p weight -2 0.75 0\n2 0\n3 0\n";

fn main() {
    let text = match env::args().nth(1) {
        Some(p) => fs::read_to_string(p).expect("readable file"),
        None => DEFAULT.to_string(),
    };
    let f = parse_dimacs(&text).expect("weighted DIMACS");
    let res = count(&f).unwrap();
    println!("count {}", res.value);
    print!("{}", res.stats.to_key_values());
    if f.var_count() <= BRUTEFORCE_MAX_VARS {
        println!("brute force {}", count_bruteforce(&f).unwrap());
    }
}
