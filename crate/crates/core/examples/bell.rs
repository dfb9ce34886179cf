//! Builds a Bell pair from the circuit text format and samples it.
use qvm::circuit::{parse_circuit, sample};

fn main() -> qvm::Result<()> {
    let c = parse_circuit("qubits 2\nh 0\ncnot 0 1\nmeasure 0 1 -> out\n")?;
    let run = sample(&c, 0, 2000, 42)?;
    print!("{}", run.to_text(false));
    Ok(())
}
