//! Leading singular pair of a sparse matrix by power iteration, compared
//! with a dense SVD, and the sign-vector alternative.
//!
//! cargo run --release --example power_iteration

use geco::geco::{alternating_linf_direction, certified_tau};
use geco::{approx_sv, LinearOperator, SparseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> geco::Result<()> {
    let (m, n) = (300, 200);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if rng.random::<f64>() < 0.05 {
                entries.push((i, j, rng.random_range(-1.0..1.0) + 0.3));
            }
        }
    }
    let g = SparseMatrix::from_row_sorted(m, n, entries);
    let dense = g.to_dense();
    println!("{} x {} with {} nonzeros", m, n, g.nnz());
    println!("{:>6} {:>12} {:>10}", "iters", "u^T G v", "tau");
    for iters in [1, 3, 10, 30, 100] {
        let pair = approx_sv(&g, iters, 7)?;
        println!(
            "{iters:>6} {:>12.6} {:>10.2e}",
            pair.value,
            certified_tau(&dense, &pair)
        );
    }
    let linf = alternating_linf_direction(&g, 50, 7);
    println!(
        "sign vectors: u^T G v = {:.6} after {} rounds",
        linf.value, linf.rounds
    );
    Ok(())
}
