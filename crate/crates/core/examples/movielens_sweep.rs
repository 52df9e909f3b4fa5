//! Rank sweep on MovieLens 100k with an 80/20 seeded split, writing
//! `trace.csv` and `rmse.svg` to the output directory.
//!
//! cargo run --release --example movielens_sweep -- data/ml-100k/u.data [out-dir]

use std::path::PathBuf;

use geco::cli::{cmd_complete, DataFormat, Mode, RunArgs, Settings};

fn main() -> geco::Result<()> {
    let mut args = std::env::args().skip(1);
    let dataset = PathBuf::from(args.next().unwrap_or_else(|| "data/ml-100k/u.data".into()));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "movielens-sweep".into()));
    let settings = Settings::resolve(
        &RunArgs {
            dataset: Some(dataset),
            format: Some(DataFormat::Ml100k),
            rank: Some(10),
            linf_heuristic: true,
            out: Some(out),
            ..RunArgs::default()
        },
        Mode::Complete,
    )?;
    let run = cmd_complete(&settings)?;
    println!("{:>4} {:>8} {:>8}", "rank", "train", "test");
    for (rank, train) in geco::report::per_rank(&run.records, |r| r.train_rmse) {
        let test = run
            .records
            .iter()
            .rev()
            .find(|r| r.columns as f64 == rank)
            .and_then(|r| r.test_rmse)
            .unwrap_or(f64::NAN);
        println!("{rank:>4} {train:>8.4} {test:>8.4}");
    }
    println!("wrote {} and {}", run.csv.display(), run.svg.display());
    Ok(())
}
