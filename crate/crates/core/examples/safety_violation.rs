// Show why a control cannot always be dropped: after the first rotation of a
// four-qubit matrix, an uncontrolled gate on qubit 2 mixes a zeroed row with a
// live one.

use qgd::synth::{safety_check, ZeroPattern};
use qgd::{minimal_controls, ControlSpec};

pub fn run_example() -> qgd::Result<()> {
    let mut zero = ZeroPattern::new(4)?;
    zero.mark_position(16, 1);

    match safety_check(&zero, &ControlSpec::uncontrolled(2)) {
        Ok(()) => println!("uncontrolled gate is safe"),
        Err(violations) => {
            for v in violations {
                println!(
                    "uncontrolled gate mixes positions {:?} (basis rows {:?}) in column {}",
                    v.positions, v.rows, v.column
                );
            }
        }
    }

    let spec = minimal_controls(4, 1, 15)?;
    println!(
        "with the rule's controls {:?}: {}",
        spec.controls,
        if safety_check(&zero, &spec).is_ok() {
            "safe"
        } else {
            "unsafe"
        }
    );
    Ok(())
}

fn main() -> qgd::Result<()> {
    run_example()
}
