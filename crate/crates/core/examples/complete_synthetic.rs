//! Completes a partially observed low-rank matrix and prints the error on
//! held-out entries after each greedy step.
//!
//! cargo run --release --example complete_synthetic

use geco::data::{synth_low_rank, SplitSpec};
use geco::objective::rmse;
use geco::{
    geco_run, CompletionObjective, FactoredMatrix, GecoConfig, IterationRecord, ObservationSet,
};

fn main() -> geco::Result<()> {
    // 200 x 150, rank 4, half the entries observed with a little noise
    let inst = synth_low_rank(200, 150, &[30.0, 20.0, 10.0, 5.0], 0.05, 0.5, 1)?;
    let entries = inst.observations.entries();
    let (train_idx, test_idx) = geco::data::split_indices(
        entries.len(),
        &SplitSpec {
            ratio: 0.8,
            seed: 1,
        },
    );
    let pick = |idx: &[usize]| {
        ObservationSet::new(
            200,
            150,
            idx.iter()
                .map(|&k| (entries[k].row, entries[k].col, entries[k].value)),
        )
    };
    let (train, test) = (pick(&train_idx)?, pick(&test_idx)?);

    let objective = CompletionObjective::new(train.clone());
    let config = GecoConfig {
        replacement_attempts: 0,
        ..GecoConfig::plain(6)
    };
    println!(
        "{:>4} {:>4} {:>12} {:>10} {:>10}",
        "step", "rank", "objective", "train", "test"
    );
    let (a, _) = geco_run(
        &objective,
        config,
        &mut |r: &mut IterationRecord, f: &FactoredMatrix| {
            r.train_rmse = rmse(f, &train, 0.0, None).ok();
            r.test_rmse = rmse(f, &test, 0.0, None).ok();
            println!(
                "{:>4} {:>4} {:>12.4e} {:>10.4} {:>10.4}",
                r.iteration,
                r.rank,
                r.objective,
                r.train_rmse.unwrap(),
                r.test_rmse.unwrap()
            );
        },
    )?;
    println!(
        "relative error vs ground truth: {:.4}",
        geco::data::recovery_error(&a, &inst.truth)
    );
    Ok(())
}
