//! Recovers a hidden XOR period from a two-to-one table.
use qvm::algorithms::simon;
use qvm::cli::simon_table;
use qvm::rng::seeded;

fn main() -> qvm::Result<()> {
    let s = 0b1011;
    let f = simon_table(4, s, &mut seeded(5))?;
    let out = simon(&f, 4, 11)?;
    println!("samples: {:?}", out.samples.iter().map(|k| format!("{k:04b}")).collect::<Vec<_>>());
    println!("nullspace: {:?}", out.nullspace.iter().map(|k| format!("{k:04b}")).collect::<Vec<_>>());
    println!("tag: {:?}  (hidden {s:04b}), {} queries", out.tag, out.queries);
    Ok(())
}
