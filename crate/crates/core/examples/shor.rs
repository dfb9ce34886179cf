use qvm::factoring::{factor, good_k_mass, shor_k_distribution, FactorConfig, OrderProblem};
use qvm::rng::seeded;

fn main() -> qvm::Result<()> {
    let p = OrderProblem::new(15, 7)?;
    let dist = shor_k_distribution(&p)?;
    let peaks: Vec<usize> = (0..dist.len()).filter(|&k| dist[k] > 0.01).collect();
    println!("N=15 Y=7 Q={}: peaks at {peaks:?}, good-k mass {:.4}", p.q, good_k_mass(&p, 4)?);
    for n in [15, 21, 33, 35] {
        let out = factor(n, &mut seeded(7), FactorConfig::default())?;
        println!("{n} = {} x {}  via {:?}, {} quantum repeats", out.factor, n / out.factor, out.route, out.quantum_repeats);
    }
    Ok(())
}
