//! Toffoli from two-qubit gates, then a three-qubit target from the U/W gate set.
use qvm::gates::{barenco_decompose, gate, matrix_distance, NamedGate};
use qvm::synthesis::{synthesize_uw, SynthesisConfig};

fn main() -> qvm::Result<()> {
    let seq = barenco_decompose(&gate(NamedGate::Not))?;
    println!("Barenco: {} gates, distance to Toffoli {:.2e}", seq.len(), matrix_distance(&seq.product()?, gate(NamedGate::Toffoli).matrix())?);
    for eps in [0.1, 0.05] {
        let s = synthesize_uw(&gate(NamedGate::Toffoli), eps, SynthesisConfig::default())?;
        println!("eps {eps}: {} steps, {} applications, distance {:.4}", s.steps.len(), s.length, s.distance);
    }
    Ok(())
}
