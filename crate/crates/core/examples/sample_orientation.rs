//! Draw a uniform sink-free orientation of a random multigraph and print it
//! in the orientation file format.
//!
//!     cargo run --example sample_orientation -- 12 18 7

use sinkpop::format::write_orientation;
use sinkpop::graph::GraphKind;
use sinkpop::popper::{sample_fast, ChoiceRule, PopperConfig};

fn main() -> sinkpop::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let (n, m, seed) = match args[..] {
        [n, m, seed] => (n as usize, m as usize, seed),
        _ => (12, 18, 7),
    };
    let g = GraphKind::Random { n, m, seed }.build()?;
    let run = sample_fast(&g, seed, ChoiceRule::QueueFifo, &PopperConfig::default())?;
    eprintln!("n = {n}, m = {m}: {} pops, work {}", run.tau, run.pop_work);
    print!("{}", write_orientation(&g, &run.sfo));
    Ok(())
}
