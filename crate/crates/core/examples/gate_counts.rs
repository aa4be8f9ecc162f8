// Control-count profiles, the upper bound, and CNOT estimates up to nine qubits.

use qgd::analytics::{profile, render_reports, table1_comparison};
use qgd::{bound_check, CostModel};

pub fn run_example() -> qgd::Result<()> {
    for n in 1..=6 {
        println!("n = {n}: {}", profile(n)?);
    }
    let bound = bound_check(8)?;
    println!("bound holds for n = 8: {}", bound.passed());

    for model in [CostModel::Emitted, CostModel::Linear { a: 16, b: 0 }] {
        println!("\nmodel {model}");
        print!("{}", render_reports(&table1_comparison(model)?));
    }
    Ok(())
}

fn main() -> qgd::Result<()> {
    run_example()
}
