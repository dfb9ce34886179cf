use qvm::reversible::{compile_reversible, ClassicalCircuit, ClassicalGate};
use qvm::StateVector;

fn main() -> qvm::Result<()> {
    // full adder sum and carry
    use ClassicalGate::*;
    let f = ClassicalCircuit::new(3, vec![Xor(0, 1), Xor(3, 2), And(0, 1), And(3, 2), Or(5, 6)], vec![4, 7])?;
    let rc = compile_reversible(&f)?;
    println!("{} qubits, {} gates", rc.circuit.num_qubits(), rc.circuit.len());
    for i in 0..8 {
        let mut s = StateVector::basis_state(rc.circuit.num_qubits(), rc.basis_index(i, 0))?;
        rc.circuit.apply_unitary(&mut s)?;
        let hit = (0..4).find(|&j| s.amplitude(rc.basis_index(i, j)).norm() > 0.5).unwrap();
        println!("{i:03b} -> sum {} carry {}", hit >> 1, hit & 1);
    }
    Ok(())
}
