// Expand a two-qubit decomposition into u3 and cx gates and print OpenQASM.

use qgd::{
    decompose, distance_up_to_phase, expand_circuit, export_qasm, haar_random_unitary,
    DecomposeOptions, QasmOptions,
};

pub fn run_example() -> qgd::Result<()> {
    let u = haar_random_unitary(2, 7)?;
    let result = decompose(&u, &DecomposeOptions::default())?;
    let elementary = expand_circuit(&result.circuit)?;
    let distance = distance_up_to_phase(&elementary.simulate()?, &u)?;
    eprintln!(
        "{} controlled gates -> {} CNOT + {} single-qubit, distance {distance:.2e}",
        result.circuit.gates.len(),
        elementary.cnot_count(),
        elementary.single_qubit_count()
    );
    print!("{}", export_qasm(&elementary, QasmOptions::default())?);
    Ok(())
}

fn main() -> qgd::Result<()> {
    run_example()
}
