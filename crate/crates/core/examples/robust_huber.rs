//! Low-rank approximation of a matrix with sparse large outliers: Huber
//! loss against squared loss at the same rank.
//!
//! cargo run --release --example robust_huber

use geco::data::{recovery_error, synth_outliers};
use geco::{
    geco_run, noop_observer, CompletionObjective, GecoConfig, HuberObjective, ObservationSet,
};

fn main() -> geco::Result<()> {
    println!("relative Frobenius error against the clean matrix");
    println!(
        "{:>4} {:>8} {:>10} {:>10}",
        "seed", "outliers", "huber", "squared"
    );
    for seed in 0..5 {
        let inst = synth_outliers(60, 50, &[40.0, 20.0, 10.0], 0.05, 50.0, seed)?;
        let config = GecoConfig {
            seed,
            ..GecoConfig::plain(3)
        };
        let huber = HuberObjective::new(inst.target.clone());
        let (a_h, _) = geco_run(&huber, config.clone(), &mut noop_observer())?;
        let squared = CompletionObjective::new(ObservationSet::full(inst.target.matrix())?);
        let (a_s, _) = geco_run(&squared, config, &mut noop_observer())?;
        println!(
            "{seed:>4} {:>8} {:>10.4} {:>10.4}",
            inst.outliers.len(),
            recovery_error(&a_h, &inst.truth),
            recovery_error(&a_s, &inst.truth)
        );
    }
    Ok(())
}
