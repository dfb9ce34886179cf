use qvm::gates::matrix_distance;
use qvm::transforms::{approx_qfft_bound, dft_matrix, qfft_circuit};

fn main() -> qvm::Result<()> {
    for m in 1..=6 {
        let reg: Vec<usize> = (0..m).collect();
        let u = qfft_circuit(m, &reg, None)?.to_matrix()?;
        println!("m={m}: max |QFFT - DFT| = {:.2e}", (u - dft_matrix(m)).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let reg: Vec<usize> = (0..8).collect();
    let exact = qfft_circuit(8, &reg, None)?.to_matrix()?;
    for cutoff in 2..=6 {
        let approx = qfft_circuit(8, &reg, Some(cutoff))?.to_matrix()?;
        println!("cutoff {cutoff}: distance {:.4}, bound {:.4}", matrix_distance(&approx, &exact)?, approx_qfft_bound(8, cutoff));
    }
    Ok(())
}
