//! The pop count has the same law on the n-cycle and the n-lollipop, and the
//! same law as the absorption time of a simple walk.

use sinkpop::harness::{exact_equality, run_distribution_equality_experiment, run_walk_experiment};

fn main() -> sinkpop::Result<()> {
    for n in 2..=4 {
        let (equal, horizon, tail) = exact_equality(n)?;
        println!("n = {n}: exact laws equal = {equal} up to {horizon} pops (tail {tail:.1e})");
    }
    let r = run_distribution_equality_experiment(7, 100_000, 2)?;
    println!("n = 7 sampled: {:?} {}", r.verdict, r.details["chi_square"]);
    let w = run_walk_experiment(7, 100_000, 2)?;
    println!("walk: canonical {} -> {:?}", w.details["canonical"], w.verdict);
    Ok(())
}
