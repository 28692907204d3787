//! Running a graph and one of its subgraphs on shared stacks: no vertex is
//! popped more often in the larger graph.

use sinkpop::graph::GraphKind;
use sinkpop::harness::checks::{monotonicity_check, random_class_s_subgraph};

fn main() -> sinkpop::Result<()> {
    let g = GraphKind::Random { n: 7, m: 14, seed: 5 }.build()?;
    let h = random_class_s_subgraph(&g, 5, 500).expect("a class-S subgraph");
    println!("G: {} edges; H keeps edges {:?}", g.edge_count(), h.edge_map);
    let s = monotonicity_check(&g, &h, 2000, 8)?;
    println!("{} runs, {} comparisons, {} violations", s.runs, s.comparisons, s.violations);
    Ok(())
}
