use qvm::algorithms::find_minimum;
use qvm::rng::seeded;
use qvm::Oracle;

fn main() -> qvm::Result<()> {
    let table: Vec<u64> = (0..64u64).map(|i| (i * 37 + 11) % 61).collect();
    let f = Oracle::new(table, 6)?;
    let out = find_minimum(&f, &mut seeded(9))?;
    println!("argmin {} value {} ({} Grover runs, {} queries)", out.index, out.value, out.grover_calls, out.queries);
    Ok(())
}
