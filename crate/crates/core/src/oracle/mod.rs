//! Brute-force ground truth for small instances.

mod chain;
mod linalg;

pub use chain::{
    ChainRule, ChainValue, ExactChain, Init, TauDistribution, EXACT_PROPER_EDGES,
    FLOAT_TOLERANCE, MAX_PROPER_EDGES,
};

use serde::Serialize;

use crate::cycle::{Digraph, DirectedSpanningTree};
use crate::error::{Error, Result};
use crate::graph::{Multigraph, Orientation};
use chain::{check_size, SinkMasks};

/// Largest number of out-arc choice vectors [`enumerate_dsts`] will scan.
pub const MAX_DST_CHOICES: u64 = 1_000_000;

/// All sink-free orientations of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SfoCensus {
    pub count: usize,
    pub members: Vec<Orientation>,
}

impl SfoCensus {
    pub fn index_of(&self, o: &Orientation) -> Option<usize> {
        self.members.binary_search(o).ok()
    }
}

/// Scans all `2^m0` orientations. Members are sorted.
pub fn enumerate_sfos(g: &Multigraph) -> Result<SfoCensus> {
    let m0 = check_size(g)?;
    let masks = SinkMasks::new(g);
    let mut members: Vec<Orientation> = (0..1u64 << m0)
        .filter(|&w| masks.is_sink_free(w))
        .map(|w| Orientation::from_proper_word(g, w))
        .collect();
    members.sort();
    Ok(SfoCensus {
        count: members.len(),
        members,
    })
}

pub fn exact_expected_tau(g: &Multigraph, rule: &ChainRule, init: &Init) -> Result<ChainValue> {
    ExactChain::build(g, rule)?.expected_tau(init)
}

pub fn exact_expected_q(
    g: &Multigraph,
    rule: &ChainRule,
    v: usize,
    init: &Init,
) -> Result<ChainValue> {
    ExactChain::build(g, rule)?.expected_q(v, init)
}

pub fn exact_absorption_distribution(
    g: &Multigraph,
    rule: &ChainRule,
) -> Result<Vec<(Orientation, ChainValue)>> {
    ExactChain::build(g, rule)?.absorption_distribution()
}

pub fn exact_tau_distribution(
    g: &Multigraph,
    rule: &ChainRule,
    horizon: usize,
) -> Result<TauDistribution> {
    Ok(ExactChain::build(g, rule)?.tau_distribution(horizon))
}

/// Every directed spanning tree of `(h, root)`, by scanning all out-arc
/// choice vectors. Sorted.
pub fn enumerate_dsts(h: &Digraph, root: usize) -> Result<Vec<DirectedSpanningTree>> {
    let n = h.vertex_count();
    if root >= n {
        return Err(Error::IndexOutOfRange {
            index: root,
            vertex_count: n,
        });
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut total: u64 = 1;
    for &w in &others {
        total = total.saturating_mul(h.out_arcs(w).len() as u64);
        if total > MAX_DST_CHOICES {
            return Err(Error::TooLarge(format!(
                "more than {MAX_DST_CHOICES} out-arc choice vectors"
            )));
        }
    }
    if total == 0 {
        return Ok(Vec::new());
    }
    let mut choice = vec![0usize; others.len()];
    let mut trees = Vec::new();
    loop {
        let mut parent_arc = vec![None; n];
        for (i, &w) in others.iter().enumerate() {
            parent_arc[w] = Some(h.out_arcs(w)[choice[i]]);
        }
        let t = DirectedSpanningTree { root, parent_arc };
        if t.is_valid_for(h) {
            trees.push(t);
        }
        // odometer
        let mut i = 0;
        loop {
            if i == others.len() {
                trees.sort();
                return Ok(trees);
            }
            choice[i] += 1;
            if choice[i] < h.out_arcs(others[i]).len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Summary of the exact chain for one graph, as emitted by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    #[serde(rename = "N")]
    pub sfo_count: usize,
    pub expected_tau: ChainValue,
    pub per_vertex_q: Vec<ChainValue>,
    pub distribution: DistributionSummary,
    pub exact_arithmetic: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistributionSummary {
    pub min_probability: f64,
    pub max_probability: f64,
    /// Every sink-free orientation has probability exactly `1/N` (or within
    /// the float tolerance when the chain is solved in floating point).
    pub uniform: bool,
}

impl ChainReport {
    pub fn compute(g: &Multigraph, rule: &ChainRule) -> Result<Self> {
        let chain = ExactChain::build(g, rule)?;
        let expected_tau = chain.expected_tau(&Init::Uniform)?;
        let vertices: Vec<usize> = (0..g.vertex_count()).collect();
        let per_vertex_q = chain
            .expected_q_all_by_state(&vertices)?
            .into_iter()
            .map(|values| {
                // average over all initial states
                let n = values.len();
                match values.iter().map(|v| v.exact.clone()).collect::<Option<Vec<_>>>() {
                    Some(exact) => ChainValue::from_exact(
                        exact.into_iter().sum::<num_rational::BigRational>()
                            / num_rational::BigRational::from_integer(n.into()),
                    ),
                    None => ChainValue::from_float(values.iter().map(|v| v.value).sum::<f64>() / n as f64),
                }
            })
            .collect();
        let dist = chain.absorption_distribution()?;
        let count = dist.len();
        let target = ChainValue::from_exact(num_rational::BigRational::new(1.into(), count.into()));
        let summary = DistributionSummary {
            min_probability: dist.iter().map(|(_, p)| p.value).fold(f64::INFINITY, f64::min),
            max_probability: dist.iter().map(|(_, p)| p.value).fold(0.0, f64::max),
            uniform: dist.iter().all(|(_, p)| p.matches(&target, FLOAT_TOLERANCE)),
        };
        Ok(ChainReport {
            sfo_count: count,
            expected_tau,
            per_vertex_q,
            distribution: summary,
            exact_arithmetic: chain.is_exact(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> ChainValue {
        ChainValue::from_exact(BigRational::new(n.into(), d.into()))
    }

    fn min_rule(g: &Multigraph) -> ChainRule {
        ChainRule::min_vertex_id(g.vertex_count())
    }

    #[test]
    fn census_examples() {
        let count = |k: GraphKind| enumerate_sfos(&k.build().unwrap()).unwrap().count;
        assert_eq!(count(GraphKind::Cycle(1)), 1);
        for n in 1..=6 {
            assert_eq!(count(GraphKind::Lollipop(n)), 1);
        }
        assert_eq!(count(GraphKind::Cycle(3)), 2);
        // theta(k): every orientation except the two with all edges one way
        assert_eq!(count(GraphKind::Theta(3)), 6);
        let census = enumerate_sfos(&GraphKind::Theta(3).build().unwrap()).unwrap();
        let g = GraphKind::Theta(3).build().unwrap();
        assert!(census.members.iter().all(|o| o.is_sink_free(&g)));
        assert!(census.members.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn expected_tau_examples() {
        for (n, expect) in [(3, 3), (4, 6)] {
            let g = GraphKind::Cycle(n).build().unwrap();
            assert_eq!(exact_expected_tau(&g, &min_rule(&g), &Init::Uniform).unwrap(), q(expect, 1));
        }
        let c1 = GraphKind::Cycle(1).build().unwrap();
        assert_eq!(exact_expected_tau(&c1, &min_rule(&c1), &Init::Uniform).unwrap(), q(0, 1));
        let l4 = GraphKind::Lollipop(4).build().unwrap();
        let anti = Orientation::zeros(&l4);
        assert_eq!(
            exact_expected_tau(&l4, &min_rule(&l4), &Init::Fixed(anti)).unwrap(),
            q(12, 1)
        );
    }

    #[test]
    fn expected_q_examples() {
        for n in 2..=4 {
            let g = GraphKind::Cycle(n).build().unwrap();
            for v in 0..n {
                assert_eq!(
                    exact_expected_q(&g, &min_rule(&g), v, &Init::Uniform).unwrap(),
                    q(n as i64 - 1, 2)
                );
            }
        }
        let l4 = GraphKind::Lollipop(4).build().unwrap();
        assert_eq!(exact_expected_q(&l4, &min_rule(&l4), 0, &Init::Uniform).unwrap(), q(3, 1));
        assert_eq!(exact_expected_q(&l4, &min_rule(&l4), 3, &Init::Uniform).unwrap(), q(0, 1));
    }

    #[test]
    fn absorption_examples() {
        let c3 = GraphKind::Cycle(3).build().unwrap();
        let d = exact_absorption_distribution(&c3, &min_rule(&c3)).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|(_, p)| *p == q(1, 2)));

        let l3 = GraphKind::Lollipop(3).build().unwrap();
        let d = exact_absorption_distribution(&l3, &min_rule(&l3)).unwrap();
        assert_eq!(d, vec![(Orientation::from_bits(&l3, vec![1, 1, 0]).unwrap(), q(1, 1))]);

        let t3 = GraphKind::Theta(3).build().unwrap();
        let d = exact_absorption_distribution(&t3, &min_rule(&t3)).unwrap();
        assert_eq!(d.len(), 6);
        assert!(d.iter().all(|(_, p)| *p == q(1, 6)));
    }

    #[test]
    fn tau_distribution_examples() {
        let c1 = GraphKind::Cycle(1).build().unwrap();
        let d = exact_tau_distribution(&c1, &min_rule(&c1), 3).unwrap();
        assert_eq!(d.probabilities[0], q(1, 1));
        assert_eq!(d.tail, q(0, 1));

        let c3 = GraphKind::Cycle(3).build().unwrap();
        let d = exact_tau_distribution(&c3, &min_rule(&c3), 0).unwrap();
        assert_eq!(d.probabilities[0], q(2, 8));
    }

    #[test]
    fn dst_enumeration_examples() {
        let tri = Digraph::bidirected(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        for root in 0..3 {
            assert_eq!(enumerate_dsts(&tri, root).unwrap().len(), 3);
        }
        let sq = Digraph::bidirected(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        for root in 0..4 {
            assert_eq!(enumerate_dsts(&sq, root).unwrap().len(), 4);
        }
        let functional = Digraph::new(3, [(1, 0), (2, 1)]).unwrap();
        assert_eq!(enumerate_dsts(&functional, 0).unwrap().len(), 1);

        let big = Digraph::bidirected(
            21,
            (0..21).flat_map(|i| [(i, (i + 1) % 21), (i, (i + 5) % 21)]),
        )
        .unwrap();
        assert!(matches!(enumerate_dsts(&big, 0), Err(Error::TooLarge(_))));
    }

    #[test]
    fn report_for_theta() {
        let g = GraphKind::Theta(3).build().unwrap();
        let r = ChainReport::compute(&g, &min_rule(&g)).unwrap();
        assert_eq!(r.sfo_count, 6);
        assert!(r.distribution.uniform);
        assert!(r.exact_arithmetic);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["N"], 6);
    }
}
