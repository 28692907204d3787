//! Mean pop count on the n-cycle started with exactly j clockwise edges,
//! next to 2j(n-j).

use sinkpop::harness::run_conditional_cycle_experiment;

fn main() -> sinkpop::Result<()> {
    let n = 8;
    println!(" j   mean     se      2j(n-j)");
    for j in 0..=n {
        let r = run_conditional_cycle_experiment(n, j, 50_000, j as u64)?;
        println!(
            "{j:>2}  {:>7.3}  {:.3}  {:>4}",
            r.mean.unwrap(),
            r.std_error.unwrap(),
            2 * j * (n - j)
        );
    }
    Ok(())
}
