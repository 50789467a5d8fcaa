use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qwmc::bench::Family;
use qwmc::cli::{self, Backend, BenchArgs, CliError, EncodeArgs, OracleArgs, SimulateArgs};

#[derive(Parser)]
#[command(name = "qwmc", version, about = "Quantum circuit probabilities by weighted model counting")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    RatioRandom,
    PauliExp,
}

#[derive(Subcommand)]
enum Cmd {
    /// Probability of a measurement outcome via weighted model counting.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        /// `all=0`, `all=1` or a list such as `q0=1,q2=0`.
        #[arg(long, default_value = "all=0")]
        measure: String,
        /// `builtin` or `external:<path-to-counter>`.
        #[arg(long, default_value = "builtin")]
        backend: String,
        /// Also write the formula here.
        #[arg(long)]
        emit_cnf: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Write the weighted CNF in DIMACS form.
    Encode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "all=0")]
        measure: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Probability from the statevector simulator.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "all=0")]
        measure: String,
        #[arg(long)]
        json: bool,
    },
    /// Generate seeded random circuits and optionally solve them.
    Bench {
        #[arg(long, value_enum, default_value = "ratio-random")]
        family: FamilyArg,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        tcount: usize,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mix RX/RY/RZ into the ratio-random family.
        #[arg(long)]
        rotations: bool,
        /// Directory for the generated QASM files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Solve each circuit and cross-check against the oracle.
        #[arg(long)]
        solve: bool,
        #[arg(long, default_value = "all=0")]
        measure: String,
        #[arg(long)]
        json: bool,
    },
}

fn run(args: Args) -> Result<(), CliError> {
    match args.cmd {
        Cmd::Simulate { input, measure, backend, emit_cnf, json } => {
            let backend = Backend::parse(&backend)?;
            let r = cli::cmd_simulate(&SimulateArgs { input, measure, backend, emit_cnf })?;
            print!("{}", if json { r.to_json() + "\n" } else { r.to_text() });
        }
        Cmd::Encode { input, measure, output } => {
            let r = cli::cmd_encode(&EncodeArgs { input, measure, output })?;
            println!("wrote {} ({} vars, {} clauses)", r.output, r.vars, r.clauses);
        }
        Cmd::Oracle { input, measure, json } => {
            let r = cli::cmd_oracle(&OracleArgs { input, measure })?;
            print!("{}", if json { r.to_json() + "\n" } else { r.to_text() });
        }
        Cmd::Bench { family, n, depth, tcount, runs, seed, rotations, out, solve, measure, json } => {
            let family = match family {
                FamilyArg::RatioRandom => Family::RatioRandom,
                FamilyArg::PauliExp => Family::PauliExp,
            };
            let s = cli::cmd_bench(&BenchArgs {
                family,
                n,
                depth,
                t_count: tcount,
                runs,
                seed,
                rotations,
                out_dir: out,
                solve,
                measure,
            })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&s).expect("summary serializes"));
            } else {
                print!("{}", s.to_table());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
