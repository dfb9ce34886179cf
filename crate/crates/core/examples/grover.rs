use qvm::algorithms::{grover_shots, GroverGeometry};
use qvm::Oracle;

fn main() -> qvm::Result<()> {
    for (n, marked) in [(2usize, vec![3usize]), (3, vec![5]), (4, vec![1, 9]), (6, vec![42])] {
        let f = Oracle::from_fn(n, 1, |i| u64::from(marked.contains(&i)))?;
        let g = GroverGeometry::new(f.size(), marked.len())?;
        let hits = grover_shots(&f, g.iterations, 10_000, 7)?;
        println!(
            "N={:>2} t={} q={} exact={:.4} observed={:.4}",
            f.size(),
            marked.len(),
            g.iterations,
            g.success_probability(g.iterations),
            hits as f64 / 10_000.0
        );
    }
    Ok(())
}
