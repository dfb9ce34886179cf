//! Classical Boolean circuits and their garbage-free reversible compilation.

use rand::Rng;

use crate::circuit::Circuit;
use crate::error::{validation, Result};
use crate::gates::NamedGate;
use crate::rng::SimRng;

/// A gate reading earlier wires. Wires `0..inputs` are the circuit inputs and
/// gate `k` drives wire `inputs + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalGate {
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Xor(usize, usize),
}

impl ClassicalGate {
    fn operands(self) -> Vec<usize> {
        match self {
            ClassicalGate::Not(a) => vec![a],
            ClassicalGate::And(a, b) | ClassicalGate::Or(a, b) | ClassicalGate::Xor(a, b) => vec![a, b],
        }
    }

    fn eval(self, w: &[bool]) -> bool {
        match self {
            ClassicalGate::Not(a) => !w[a],
            ClassicalGate::And(a, b) => w[a] && w[b],
            ClassicalGate::Or(a, b) => w[a] || w[b],
            ClassicalGate::Xor(a, b) => w[a] ^ w[b],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalCircuit {
    inputs: usize,
    gates: Vec<ClassicalGate>,
    outputs: Vec<usize>,
}

impl ClassicalCircuit {
    /// Checks that every gate reads only earlier wires and every output names a wire.
    pub fn new(inputs: usize, gates: Vec<ClassicalGate>, outputs: Vec<usize>) -> Result<Self> {
        for (k, g) in gates.iter().enumerate() {
            if let Some(&bad) = g.operands().iter().find(|&&w| w >= inputs + k) {
                return Err(validation(format!("gate {k} reads wire {bad}, which is not yet defined")));
            }
        }
        let wires = inputs + gates.len();
        if let Some(&bad) = outputs.iter().find(|&&w| w >= wires) {
            return Err(validation(format!("output wire {bad} does not exist ({wires} wires)")));
        }
        if outputs.is_empty() {
            return Err(validation("a classical circuit needs at least one output"));
        }
        Ok(Self { inputs, gates, outputs })
    }

    /// Random circuit of `size` gates over `inputs` inputs whose outputs are the last `outputs` wires.
    pub fn random(inputs: usize, size: usize, outputs: usize, rng: &mut SimRng) -> Result<Self> {
        let mut gates = Vec::with_capacity(size);
        for k in 0..size {
            let avail = inputs + k;
            let a = rng.random_range(0..avail);
            let b = rng.random_range(0..avail);
            gates.push(match rng.random_range(0..4) {
                0 => ClassicalGate::Not(a),
                1 => ClassicalGate::And(a, b),
                2 => ClassicalGate::Or(a, b),
                _ => ClassicalGate::Xor(a, b),
            });
        }
        let wires = inputs + size;
        let outs = (wires.saturating_sub(outputs)..wires).collect();
        Self::new(inputs, gates, outs)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[ClassicalGate] {
        &self.gates
    }

    /// Evaluates on `x` (input wire 0 is the most significant bit); output wire 0 is the most significant output bit.
    pub fn evaluate(&self, x: usize) -> usize {
        let mut wires: Vec<bool> = (0..self.inputs).map(|i| (x >> (self.inputs - 1 - i)) & 1 == 1).collect();
        for g in &self.gates {
            let v = g.eval(&wires);
            wires.push(v);
        }
        self.outputs.iter().fold(0, |acc, &w| (acc << 1) | wires[w] as usize)
    }
}

/// Compiled circuit with its qubit layout `|work, input, output>`.
#[derive(Debug, Clone)]
pub struct ReversibleCircuit {
    pub circuit: Circuit,
    pub work: Vec<usize>,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

impl ReversibleCircuit {
    /// Basis index of `|0^b, i, j>`.
    pub fn basis_index(&self, i: usize, j: usize) -> usize {
        (i << self.outputs.len()) | j
    }
}

/// Compiles `f` to a quantum circuit on `b + n + m` qubits (one work qubit per
/// gate) mapping `|0^b, i, j> -> |0^b, i, f(i) ⊕ j>`: compute every gate into
/// its work qubit, copy the outputs, then run the gates in reverse to clear
/// the work qubits.
pub fn compile_reversible(f: &ClassicalCircuit) -> Result<ReversibleCircuit> {
    let b = f.size();
    let (n, m) = (f.inputs, f.outputs.len());
    let work: Vec<usize> = (0..b).collect();
    let inputs: Vec<usize> = (b..b + n).collect();
    let outputs: Vec<usize> = (b + n..b + n + m).collect();
    let wire_qubit = |w: usize| if w < n { inputs[w] } else { work[w - n] };

    let mut compute = Circuit::new(b + n + m);
    for (k, g) in f.gates.iter().enumerate() {
        let t = work[k];
        match *g {
            ClassicalGate::Not(a) => {
                compute.named(NamedGate::Cnot, &[wire_qubit(a), t])?;
                compute.named(NamedGate::Not, &[t])?;
            }
            ClassicalGate::And(a, c) if a == c => {
                compute.named(NamedGate::Cnot, &[wire_qubit(a), t])?;
            }
            ClassicalGate::And(a, c) => {
                compute.named(NamedGate::Toffoli, &[wire_qubit(a), wire_qubit(c), t])?;
            }
            ClassicalGate::Or(a, c) if a == c => {
                compute.named(NamedGate::Cnot, &[wire_qubit(a), t])?;
            }
            ClassicalGate::Or(a, c) => {
                // a ∨ c = a ⊕ c ⊕ ac
                compute.named(NamedGate::Cnot, &[wire_qubit(a), t])?;
                compute.named(NamedGate::Cnot, &[wire_qubit(c), t])?;
                compute.named(NamedGate::Toffoli, &[wire_qubit(a), wire_qubit(c), t])?;
            }
            ClassicalGate::Xor(a, c) if a == c => {}
            ClassicalGate::Xor(a, c) => {
                compute.named(NamedGate::Cnot, &[wire_qubit(a), t])?;
                compute.named(NamedGate::Cnot, &[wire_qubit(c), t])?;
            }
        }
    }
    let mut circuit = compute.clone();
    for (k, &w) in f.outputs.iter().enumerate() {
        circuit.named(NamedGate::Cnot, &[wire_qubit(w), outputs[k]])?;
    }
    circuit.append(&compute.inverse()?)?;
    Ok(ReversibleCircuit { circuit, work, inputs, outputs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::state::StateVector;

    /// Runs every basis input through the compiled circuit and checks it against direct evaluation.
    fn exhaustive(f: &ClassicalCircuit) {
        let r = compile_reversible(f).unwrap();
        let total = r.circuit.num_qubits();
        for i in 0..1usize << f.inputs() {
            for j in 0..1usize << f.outputs() {
                let mut s = StateVector::basis_state(total, r.basis_index(i, j)).unwrap();
                r.circuit.apply_unitary(&mut s).unwrap();
                let expected = r.basis_index(i, f.evaluate(i) ^ j);
                assert!((s.amplitude(expected).norm() - 1.0).abs() < 1e-12, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn and_gate() {
        let f = ClassicalCircuit::new(2, vec![ClassicalGate::And(0, 1)], vec![2]).unwrap();
        assert_eq!((0..4).map(|x| f.evaluate(x)).collect::<Vec<_>>(), vec![0, 0, 0, 1]);
        exhaustive(&f);
    }

    #[test]
    fn identity_is_a_cnot() {
        let f = ClassicalCircuit::new(1, vec![], vec![0]).unwrap();
        let r = compile_reversible(&f).unwrap();
        assert_eq!(r.circuit.len(), 1);
        exhaustive(&f);
    }

    #[test]
    fn parity_of_three() {
        let f = ClassicalCircuit::new(3, vec![ClassicalGate::Xor(0, 1), ClassicalGate::Xor(3, 2)], vec![4]).unwrap();
        exhaustive(&f);
    }

    #[test]
    fn random_circuits() {
        let mut rng = seeded(4);
        for _ in 0..20 {
            let f = ClassicalCircuit::random(3, 4, 2, &mut rng).unwrap();
            exhaustive(&f);
        }
    }

    #[test]
    fn malformed_wiring_is_rejected() {
        assert!(ClassicalCircuit::new(2, vec![ClassicalGate::And(0, 2)], vec![2]).is_err());
        assert!(ClassicalCircuit::new(2, vec![ClassicalGate::Not(0)], vec![5]).is_err());
    }
}
