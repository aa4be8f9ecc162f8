// Fully controlled versus minimized circuits for a three-qubit unitary.

use qgd::{decompose, haar_random_unitary, DecomposeOptions, Gate};

fn describe(gate: &Gate) -> String {
    match gate {
        Gate::ControlledU2 { spec, .. } => {
            let controls: Vec<String> = spec
                .controls
                .iter()
                .map(|c| format!("{}{}", if c.value { "" } else { "!" }, c.qubit))
                .collect();
            format!("U on q{} | {}", spec.target, controls.join(" "))
        }
        other => format!("{other:?}"),
    }
}

pub fn run_example() -> qgd::Result<()> {
    let u = haar_random_unitary(3, 11)?;
    for minimize in [false, true] {
        let options = DecomposeOptions {
            minimize,
            ..DecomposeOptions::default()
        };
        let result = decompose(&u, &options)?;
        let label = if minimize {
            "minimized"
        } else {
            "fully controlled"
        };
        println!(
            "{label}: {} gates, profile {}",
            result.circuit.gates.len(),
            result.profile
        );
        for gate in &result.circuit.gates {
            println!("  {}", describe(gate));
        }
    }
    Ok(())
}

fn main() -> qgd::Result<()> {
    run_example()
}
