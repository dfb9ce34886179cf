//! Phase estimation on a single-qubit phase gate, then order finding.
use qvm::factoring::{kitaev_bits, kitaev_order};
use qvm::gates::{gate, NamedGate};
use qvm::rng::seeded;
use qvm::transforms::{estimate_phase, PhaseConfig};
use qvm::StateVector;
use std::f64::consts::PI;

fn main() -> qvm::Result<()> {
    let mut rng = seeded(4);
    let u = gate(NamedGate::W { alpha: 13.0 / 64.0 });
    let est = estimate_phase(&u, &StateVector::basis_state(1, 1)?, PhaseConfig::new(6), &mut rng)?;
    println!("θ ≈ {:.5}, true {:.5}, failure bound {:.2e}", est.theta, 2.0 * PI * 13.0 / 64.0, est.failure_bound);
    for (n, y) in [(15, 7), (21, 2), (21, 13)] {
        let r = kitaev_order(n, y, PhaseConfig::new(kitaev_bits(n)), &mut rng, 10)?;
        println!("order of {y} mod {n}: {:?} after {} runs", r.order, r.repeats.len());
    }
    Ok(())
}
