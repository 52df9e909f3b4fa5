//! Driving the iterations one at a time: inspect the singular value used
//! for each step and stop on a custom rule.
//!
//! cargo run --release --example step_by_step

use geco::data::synth_low_rank;
use geco::{noop_observer, CompletionObjective, GecoConfig, GecoRun};

fn main() -> geco::Result<()> {
    let inst = synth_low_rank(100, 80, &[10.0, 6.0, 3.0], 0.2, 0.6, 9)?;
    let objective = CompletionObjective::new(inst.observations);
    let mut run = GecoRun::new(&objective, GecoConfig::plain(20))?;
    let mut previous = run.objective_value();
    while !run.is_finished() {
        run.advance(&mut noop_observer())?;
        let sigma = run.last_pair().map_or(0.0, |p| p.value);
        let value = run.objective_value();
        println!(
            "columns {:>2}  sigma_1(grad) {sigma:.3e}  objective {value:.5}",
            run.columns()
        );
        // stop once a step gains less than 10% of the objective
        if previous - value < 0.1 * previous {
            println!("relative gain below 10%, stopping");
            break;
        }
        previous = value;
    }
    Ok(())
}
