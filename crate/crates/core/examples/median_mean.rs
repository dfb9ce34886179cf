//! Median and mean estimation by amplitude counting.
use qvm::algorithms::{estimate_mean, estimate_median};
use qvm::rng::seeded;
use qvm::Oracle;

fn main() -> qvm::Result<()> {
    let mut rng = seeded(2);
    let f = Oracle::from_fn(6, 7, |i| ((i * i) % 97) as u64)?;
    let med = estimate_median(&f, 0.1, &mut rng)?;
    println!("median ~ {} in {} steps, {} queries", med.value, med.steps, med.queries);

    let values: Vec<f64> = (0..64).map(|i| ((i as f64) * 0.7).sin() * 0.45).collect();
    let truth = values.iter().sum::<f64>() / 64.0;
    let mean = estimate_mean(&values, 0.05, &mut rng)?;
    println!("mean ~ {:.4} (direct {:.4}), {} queries", mean.mean, truth, mean.queries);
    Ok(())
}
