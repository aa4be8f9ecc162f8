// Controls kept by each rotation of a four-qubit decomposition.

use qgd::synth::control_count_distribution;
use qgd::{control_count_table, minimal_controls};

pub fn run_example() -> qgd::Result<()> {
    let table = control_count_table(4)?;
    print!("{}", table.render());
    println!("distribution: {}", control_count_distribution(4)?);

    for (i, j) in [(1, 16), (1, 15), (2, 9)] {
        let spec = minimal_controls(4, i, j)?;
        let controls: Vec<String> = spec
            .controls
            .iter()
            .map(|c| format!("q{}={}", c.qubit, u8::from(c.value)))
            .collect();
        println!(
            "column {i}, row {j}: target q{} controls [{}]",
            spec.target,
            controls.join(", ")
        );
    }
    Ok(())
}

fn main() -> qgd::Result<()> {
    run_example()
}
