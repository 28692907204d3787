//! Chi-square check of the sampler against the full list of sink-free
//! orientations.

use sinkpop::graph::GraphKind;
use sinkpop::harness::run_uniformity_experiment;

fn main() -> sinkpop::Result<()> {
    for kind in [GraphKind::Theta(3), GraphKind::Cycle(5), GraphKind::Theta(5)] {
        let r = run_uniformity_experiment(&kind.build()?, 100_000, 1)?;
        println!(
            "{kind:?}: {} outcomes, counts {}, chi2 {} -> {:?}",
            r.details["sfo_count"], r.details["counts"], r.details["chi_square"]["statistic"], r.verdict
        );
    }
    Ok(())
}
