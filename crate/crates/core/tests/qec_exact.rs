//! Memory-experiment rates against exact enumeration of Pauli patterns.
use num_complex::Complex64;
use qvm::qec::{apply_pauli, css_correct, css_encode_logical, memory_experiment, steane, NoiseModel, PauliError, PauliKind};
use qvm::rng::seeded;

/// Probability that one noise round followed by correction damages the
/// logical state, summing over every Pauli pattern on seven qubits.
fn exact_failure(eta: f64, kinds: &[PauliKind]) -> f64 {
    let code = steane();
    let logical = [Complex64::new(0.6, 0.1), Complex64::new(-0.3, 0.734_846_922_8)];
    let ideal = css_encode_logical(&code, &logical).unwrap();
    let per_kind = eta / kinds.len() as f64;
    let choices = kinds.len() + 1;
    let mut total = 0.0;
    let mut rng = seeded(0);
    for pattern in 0..choices.pow(7) {
        let mut s = ideal.clone();
        let mut p = 1.0;
        let mut rest = pattern;
        for qubit in 0..7 {
            let c = rest % choices;
            rest /= choices;
            if c == 0 {
                p *= 1.0 - eta;
            } else {
                p *= per_kind;
                apply_pauli(&mut s, PauliError { qubit, kind: kinds[c - 1] }).unwrap();
            }
        }
        css_correct(&mut s, &code, &mut rng).unwrap();
        if ideal.fidelity(&s).unwrap() < 1.0 - 1e-9 {
            total += p;
        }
    }
    total
}

fn tail(eta: f64) -> f64 {
    1.0 - (1.0 - eta).powi(7) - 7.0 * eta * (1.0 - eta).powi(6)
}

#[test]
fn y_noise_fails_on_every_multi_error_pattern_but_a_few() {
    let exact = exact_failure(0.01, &[PauliKind::Y]);
    assert!(exact <= tail(0.01) + 1e-15);
    assert!(tail(0.01) - exact < 1e-4, "{exact}");
}

#[test]
fn depolarizing_memory_matches_enumeration() {
    let eta = 0.01;
    let exact = exact_failure(eta, &[PauliKind::X, PauliKind::Y, PauliKind::Z]);
    // some two-error patterns (an X and a Z on different qubits) are corrected
    assert!(exact < tail(eta));
    let rep = memory_experiment(&steane(), &NoiseModel::depolarizing(eta).unwrap(), 1, 40_000, 8, 0).unwrap();
    let sigma = (exact * (1.0 - exact) / 40_000.0).sqrt();
    assert!((rep.rate - exact).abs() <= 4.0 * sigma, "{} vs {exact}", rep.rate);
}

#[test]
fn y_memory_matches_enumeration() {
    let exact = exact_failure(0.01, &[PauliKind::Y]);
    let rep = memory_experiment(&steane(), &NoiseModel::only(0.01, PauliKind::Y).unwrap(), 1, 40_000, 9, 0).unwrap();
    let sigma = (exact * (1.0 - exact) / 40_000.0).sqrt();
    assert!((rep.rate - exact).abs() <= 4.0 * sigma, "{} vs {exact}", rep.rate);
}
