//! Pop work on cycles and complete graphs as n doubles.

use sinkpop::harness::{run_scaling_benchmark, ScalingFamily};

fn main() -> sinkpop::Result<()> {
    for (family, sizes) in [
        (ScalingFamily::Cycle, vec![50, 100, 200, 400]),
        (ScalingFamily::Complete, vec![10, 20, 40, 80]),
    ] {
        let r = run_scaling_benchmark(family, &sizes, 1000, 17)?;
        match r.mean {
            Some(e) => println!("{family:?}: fitted exponent {e:.3} ({:?})", r.verdict),
            None => println!("{family:?}: no pops at some size ({:?})", r.verdict),
        }
        for row in r.details["sizes"].as_array().unwrap() {
            println!(
                "  n = {:>3}  mean tau {:>10.1}  mean work {:>10.1}",
                row["n"], row["mean_tau"].as_f64().unwrap(), row["mean_pop_work"].as_f64().unwrap()
            );
        }
    }
    Ok(())
}
