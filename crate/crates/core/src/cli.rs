//! The `qgd` command line.
//!
//! Exit codes: 0 on success, 1 when a residual or verification check fails,
//! 2 on malformed input or inconsistent flags. Diagnostics go to stderr.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::analytics::{self, render_reports};
use crate::circuit::{export_qasm, Circuit, QasmOptions};
use crate::error::Error;
use crate::expand::{expand_circuit, CostModel};
use crate::graycode::gray_code;
use crate::matrix::{distance_up_to_phase, haar_random_unitary, UnitaryMatrix};
use crate::synth::{decompose, DecomposeOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qgd",
    version,
    about = "Gray-code Givens synthesis of multi-qubit unitaries"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Qasm,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose a unitary from a matrix file into a circuit.
    Decompose {
        #[arg(long = "in", value_name = "MATRIX")]
        input: PathBuf,
        #[arg(long = "out", value_name = "CIRCUIT")]
        output: PathBuf,
        /// Keep every gate fully controlled.
        #[arg(long)]
        no_minimize: bool,
        /// Expand controlled gates into single-qubit gates and CNOTs.
        #[arg(long)]
        expand: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        /// Per-basis-state residual tolerance; the bound is tol * 2^n.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Check that a circuit reproduces a matrix up to global phase.
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        /// Passes iff the phase-free distance is at most tol * 2^n.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Write the unitary of a circuit to a matrix file.
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Print control-count and CNOT statistics.
    Counts {
        #[arg(long)]
        n: usize,
        /// emitted | linear:a,b
        #[arg(long, default_value = "emitted")]
        model: CostModel,
        /// Compare against the published reference rows for n = 1..9.
        #[arg(long)]
        table1_compare: bool,
        /// Also write the report as JSON.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Sample a Haar-random unitary.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Print the Gray code table and the position-to-basis map.
    Gray {
        #[arg(long)]
        n: usize,
    },
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_BAD_INPUT
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(config.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Residual { .. } => EXIT_CHECK_FAILED,
                _ => EXIT_BAD_INPUT,
            }
        }
    }
}

fn execute(command: Command) -> crate::Result<i32> {
    match command {
        Command::Decompose {
            input,
            output,
            no_minimize,
            expand,
            format,
            tol,
        } => {
            if format == OutputFormat::Qasm && !expand {
                eprintln!("error: --format qasm requires --expand");
                return Ok(EXIT_BAD_INPUT);
            }
            let u = UnitaryMatrix::load(&input)?;
            let options = DecomposeOptions {
                minimize: !no_minimize,
                tolerance: tol,
                audit: false,
            };
            let result = decompose(&u, &options)?;
            eprintln!(
                "decomposed {} qubits: {} gates, profile {}, escalations {}, residual {:.3e}",
                u.qubits(),
                result.circuit.gates.len(),
                result.profile,
                result.escalations,
                result.residual
            );
            let circuit = if expand {
                let c = expand_circuit(&result.circuit)?;
                eprintln!(
                    "expanded: {} CNOT, {} single-qubit",
                    c.cnot_count(),
                    c.single_qubit_count()
                );
                c
            } else {
                result.circuit
            };
            match format {
                OutputFormat::Json => circuit.save(&output)?,
                OutputFormat::Qasm => {
                    std::fs::write(&output, export_qasm(&circuit, QasmOptions::default())?)?
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            circuit,
            matrix,
            tol,
        } => {
            let circuit = Circuit::load(&circuit)?;
            let u = UnitaryMatrix::load(&matrix)?;
            if circuit.n != u.qubits() {
                return Err(Error::DimensionMismatch {
                    left: circuit.n,
                    right: u.qubits(),
                });
            }
            let d = distance_up_to_phase(&circuit.simulate()?, &u)?;
            let bound = tol * u.dim() as f64;
            if d <= bound {
                eprintln!("ok: distance {d:.3e} <= {bound:.3e}");
                Ok(EXIT_OK)
            } else {
                eprintln!("mismatch: distance {d:.3e} > {bound:.3e}");
                Ok(EXIT_CHECK_FAILED)
            }
        }
        Command::Simulate { circuit, output } => {
            let u = Circuit::load(&circuit)?.simulate()?;
            u.save(&output)?;
            Ok(EXIT_OK)
        }
        Command::Counts {
            n,
            model,
            table1_compare,
            json,
        } => {
            let profile = analytics::profile(n)?;
            println!("n = {n}");
            println!("control-count profile g(n, k): {profile}");
            println!("total rotations: {}", profile.total());
            if n >= 2 {
                let bound = analytics::bound_check(n)?;
                println!(
                    "g(n, n-1) = 3*2^(n-1) - 2: {}",
                    if bound.closed_form { "holds" } else { "FAILS" }
                );
                for e in &bound.entries {
                    println!(
                        "  g({n}, {}) = {} <= 2^{} = {}: {}",
                        n - e.i,
                        e.count,
                        n + e.i,
                        e.bound,
                        if e.pass { "ok" } else { "FAILS" }
                    );
                }
            }
            let mut reports = vec![analytics::cnot_report(n, model)?];
            if table1_compare {
                reports = analytics::table1_comparison(model)?;
            }
            print!("{}", render_reports(&reports));
            if let Some(path) = json {
                let doc = serde_json::json!({
                    "n": n,
                    "profile": profile.counts(),
                    "reports": reports,
                });
                std::fs::write(
                    path,
                    serde_json::to_string_pretty(&doc).expect("serializable"),
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Random { n, seed, output } => {
            haar_random_unitary(n, seed)?.save(&output)?;
            Ok(EXIT_OK)
        }
        Command::Gray { n } => {
            print!("{}", gray_code(n)?.render());
            Ok(EXIT_OK)
        }
    }
}
