use qvm::algorithms::deutsch_jozsa;
use qvm::rng::seeded;
use qvm::Oracle;

fn main() -> qvm::Result<()> {
    let mut rng = seeded(3);
    let constant = Oracle::new(vec![1; 8], 1)?;
    let balanced = Oracle::from_fn(3, 1, |i| (i.count_ones() & 1) as u64)?;
    for (name, f) in [("constant", &constant), ("parity", &balanced)] {
        let out = deutsch_jozsa(f, &mut rng)?;
        println!("{name:>8}: {:?} after {} query, measured {:03b}", out.tag, out.queries, out.measured);
    }
    Ok(())
}
