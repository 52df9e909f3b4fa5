//! Plugging in a new smooth loss. Only value, gradient and a smoothness
//! constant are required; the corrective step then falls back to a
//! gradient-based solver. Here: logistic loss on observed +-1 labels.
//!
//! cargo run --release --example custom_objective

use geco::data::synth_low_rank;
use geco::{
    geco_run, noop_observer, FactoredMatrix, GecoConfig, GradientOperator, ObservationSet,
    SmoothObjective, SparseMatrix,
};

struct Logistic {
    labels: ObservationSet,
}

impl SmoothObjective for Logistic {
    fn shape(&self) -> (usize, usize) {
        (self.labels.nrows(), self.labels.ncols())
    }

    fn value(&self, f: &FactoredMatrix) -> geco::Result<f64> {
        let a = f.entries_at(self.labels.positions());
        let total: f64 = a
            .iter()
            .zip(self.labels.entries())
            .map(|(&x, e)| (1.0 + (-e.value * x).exp()).ln())
            .sum();
        Ok(total / self.labels.len() as f64)
    }

    fn gradient(&self, f: &FactoredMatrix) -> geco::Result<GradientOperator> {
        let a = f.entries_at(self.labels.positions());
        let scale = 1.0 / self.labels.len() as f64;
        let entries = a
            .iter()
            .zip(self.labels.entries())
            .map(|(&x, e)| (e.row, e.col, -scale * e.value / (1.0 + (e.value * x).exp())));
        Ok(GradientOperator::Sparse(SparseMatrix::from_row_sorted(
            self.labels.nrows(),
            self.labels.ncols(),
            entries,
        )))
    }

    fn smoothness_bound(&self) -> f64 {
        0.25 / self.labels.len() as f64
    }
}

fn main() -> geco::Result<()> {
    let inst = synth_low_rank(80, 60, &[30.0, 15.0], 0.0, 0.4, 2)?;
    let labels = ObservationSet::new(
        80,
        60,
        inst.observations
            .entries()
            .iter()
            .map(|e| (e.row, e.col, if e.value >= 0.0 { 1.0 } else { -1.0 })),
    )?;
    let objective = Logistic {
        labels: labels.clone(),
    };
    let (a, trace) = geco_run(&objective, GecoConfig::plain(4), &mut noop_observer())?;
    for r in &trace.records {
        println!("rank {} logistic loss {:.4}", r.rank, r.objective);
    }
    let predictions = a.entries_at(labels.positions());
    let correct = predictions
        .iter()
        .zip(labels.entries())
        .filter(|(&p, e)| p * e.value > 0.0)
        .count();
    println!(
        "sign agreement on observed entries: {correct}/{}",
        labels.len()
    );
    Ok(())
}
