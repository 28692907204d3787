//! Uniform directed spanning trees of a grid by cycle popping.

use sinkpop::cycle::{sample_dst_with, Digraph, DstConfig};
use sinkpop::format::write_tree;
use sinkpop::stacks::StackSource;

fn main() -> sinkpop::Result<()> {
    let side = 5;
    let id = |r: usize, c: usize| r * side + c;
    let mut pairs = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                pairs.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < side {
                pairs.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let h = Digraph::bidirected(side * side, pairs)?;
    let run = sample_dst_with(&h, 0, &StackSource::new(4), &DstConfig::default())?;
    eprintln!("{} cycles popped", run.cycles_popped);
    print!("{}", write_tree(&run.tree));
    Ok(())
}
