//! Amplitudes by summing over paths, next to the dense simulator.
use qvm::circuit::random_circuit;
use qvm::pathsum::{interference_example, path_amplitude, path_amplitude_with_stats, point_mass, stochastic_simulate};
use qvm::rng::seeded;
use qvm::StateVector;

fn main() -> qvm::Result<()> {
    let (q, sc) = interference_example();
    for j in 0..4 {
        println!("<{j:02b}|C|11> = {:.4}", path_amplitude(&q, 3, j)?);
    }
    println!("randomized: {:?}", stochastic_simulate(&sc, &point_mass(2, 3))?);

    let c = random_circuit(6, 10, &mut seeded(8))?;
    let mut s = StateVector::basis_state(6, 0)?;
    c.apply_unitary(&mut s)?;
    let j = (0..64).max_by(|&a, &b| s.amplitude(a).norm().total_cmp(&s.amplitude(b).norm())).unwrap();
    let (a, stats) = path_amplitude_with_stats(&c, 0, j)?;
    println!("<{j}|C|0>: path sum {a:.6} dense {:.6} ({} paths, live set {})", s.amplitude(j), stats.paths, stats.max_live_configurations);
    Ok(())
}
