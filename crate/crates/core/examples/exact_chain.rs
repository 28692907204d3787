//! Exact expected pop counts and the absorption law for small graphs.

use sinkpop::graph::GraphKind;
use sinkpop::oracle::{ChainReport, ChainRule};

fn main() -> sinkpop::Result<()> {
    for kind in [
        GraphKind::Cycle(4),
        GraphKind::Lollipop(4),
        GraphKind::Theta(3),
        GraphKind::Complete(4),
    ] {
        let g = kind.build()?;
        let r = ChainReport::compute(&g, &ChainRule::min_vertex_id(g.vertex_count()))?;
        let q: Vec<String> = r
            .per_vertex_q
            .iter()
            .map(|v| v.exact.as_ref().map_or(format!("{:.4}", v.value), |x| x.to_string()))
            .collect();
        println!(
            "{kind:?}: N = {}, E tau = {}, E Q = [{}], uniform = {}",
            r.sfo_count,
            r.expected_tau.exact.as_ref().unwrap(),
            q.join(", "),
            r.distribution.uniform
        );
    }
    Ok(())
}
