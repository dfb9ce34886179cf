use qvm::qec::{concatenation_trajectory, eta_eff_majority, levels_to_reach, threshold};

fn main() -> qvm::Result<()> {
    println!("majority code at η=0.01: {:.3e}", eta_eff_majority(0.01));
    println!("threshold (area 10, d 1): {:.6}", threshold(10, 1)?);
    for (k, eta) in concatenation_trajectory(0.01, 10, 1, 4)?.iter().enumerate() {
        println!("level {k}: {eta:.6e}");
    }
    println!("levels to 1e-15: {:?}", levels_to_reach(0.01, 10, 1, 1e-15)?);
    Ok(())
}
