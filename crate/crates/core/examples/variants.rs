//! Objective after each rank for the algorithm variants: sign-vector
//! candidates, replacement steps, diagonal core and a Frobenius penalty.
//!
//! cargo run --release --example variants

use geco::data::synth_low_rank;
use geco::report::per_rank;
use geco::{geco_run, noop_observer, CompletionObjective, GecoConfig};

fn main() -> geco::Result<()> {
    let inst = synth_low_rank(120, 100, &[20.0, 12.0, 8.0, 5.0, 3.0], 0.1, 0.3, 4)?;
    let objective = CompletionObjective::new(inst.observations);
    let base = GecoConfig {
        rank_budget: 6,
        seed: 4,
        ..GecoConfig::plain(6)
    };
    let variants = [
        ("plain", base.clone()),
        (
            "sign-vector",
            GecoConfig {
                use_linf_heuristic: true,
                ..base.clone()
            },
        ),
        (
            "replacements",
            GecoConfig {
                replacement_attempts: 20,
                ..base.clone()
            },
        ),
        (
            "diagonal B",
            GecoConfig {
                diagonal_b: true,
                ..base.clone()
            },
        ),
        (
            "frobenius 1e-5",
            GecoConfig {
                frobenius_coeff: 1e-5,
                ..base.clone()
            },
        ),
    ];
    for (name, config) in variants {
        let (_, trace) = geco_run(&objective, config, &mut noop_observer())?;
        let curve: Vec<String> = per_rank(&trace.records, |r| Some(r.objective))
            .iter()
            .map(|(_, v)| format!("{v:.4}"))
            .collect();
        println!(
            "{name:<15} {}  (replacements {}/{})",
            curve.join(" "),
            trace.replacements_accepted(),
            trace.replacements_attempted()
        );
    }
    Ok(())
}
