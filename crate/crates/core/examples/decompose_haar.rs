// Decompose a Haar-random four-qubit unitary and check the reconstruction.

use qgd::{decompose, distance_up_to_phase, haar_random_unitary, DecomposeOptions};

pub fn run_example() -> qgd::Result<()> {
    let u = haar_random_unitary(4, 2024)?;
    let result = decompose(&u, &DecomposeOptions::default())?;
    let distance = distance_up_to_phase(&result.circuit.simulate()?, &u)?;

    println!("gates:        {}", result.circuit.gates.len());
    println!("profile:      {}", result.profile);
    println!("escalations:  {}", result.escalations);
    println!("global phase: {:.6}", result.global_phase.angle());
    println!("residual:     {:.3e}", result.residual);
    println!("distance:     {distance:.3e}");
    assert!(distance < 1e-9 * u.dim() as f64);
    Ok(())
}

fn main() -> qgd::Result<()> {
    run_example()
}
