// Print the reflected Gray code on four bits and the position-to-basis map.

use qgd::{gray_code, BasisMap};

pub fn run_example() -> qgd::Result<()> {
    let table = gray_code(4)?;
    print!("{}", table.render());

    let map = BasisMap::new(4)?;
    for p in 1..=table.len() {
        println!(
            "position {p:2} -> basis {:2} (code {:04b})",
            map.gamma(p),
            table.code(p)
        );
    }
    Ok(())
}

fn main() -> qgd::Result<()> {
    run_example()
}
