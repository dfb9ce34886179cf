//! Encodes a logical qubit in the seven-qubit code, corrupts it and repairs it.
use num_complex::Complex64;
use qvm::qec::{apply_pauli, css_correct, css_encode_logical, memory_experiment, steane, NoiseModel, PauliError, PauliKind};
use qvm::rng::seeded;

fn main() -> qvm::Result<()> {
    let code = steane();
    let ideal = css_encode_logical(&code, &[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)])?;
    let mut rng = seeded(1);
    for (qubit, kind) in [(0, PauliKind::X), (3, PauliKind::Z), (6, PauliKind::Y)] {
        let mut s = ideal.clone();
        apply_pauli(&mut s, PauliError { qubit, kind })?;
        let rep = css_correct(&mut s, &code, &mut rng)?;
        println!("{kind:?} on {qubit}: syndromes {:03b}/{:03b}, fidelity {:.12}", rep.bit_syndrome, rep.phase_syndrome, ideal.fidelity(&s)?);
    }
    let mem = memory_experiment(&code, &NoiseModel::depolarizing(0.01)?, 1, 20_000, 5, 0)?;
    println!("memory at η=0.01: {} / {} failed ({:.2e} ± {:.1e})", mem.failures, mem.shots, mem.rate, mem.std_error);
    Ok(())
}
