//! Pathwise checks on shared stacks: rule independence, the subgraph
//! coupling, and order independence of cycle popping.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cycle::{sample_dst_with, CycleOrder, Digraph, DstConfig};
use crate::error::Result;
use crate::graph::{Multigraph, Subgraph};
use crate::popper::{coupled_run, sample_stacked, ChoiceRule, PopperConfig};
use crate::stacks::{derive_seed, StackSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AgreementSummary {
    pub trials: u64,
    pub disagreements: u64,
}

impl AgreementSummary {
    pub fn pass(&self) -> bool {
        self.disagreements == 0
    }
}

/// Runs every [`ChoiceRule`] on `trials` seeded stack realizations and counts
/// realizations where `(tau, pop multiset, final orientation)` differ.
pub fn diamond_check(g: &Multigraph, trials: usize, seed: u64) -> Result<AgreementSummary> {
    g.require_class_s()?;
    let disagreements = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let src = StackSource::new(derive_seed(seed, i));
            let cfg = PopperConfig {
                rule_seed: i,
                ..PopperConfig::default()
            };
            let mut outcomes = Vec::with_capacity(ChoiceRule::ALL.len());
            for rule in ChoiceRule::ALL {
                let r = sample_stacked(g, &src, rule, &cfg)?;
                outcomes.push((r.tau, r.pop_multiset(), r.sfo));
            }
            Ok(u64::from(outcomes.windows(2).any(|w| w[0] != w[1])))
        })
        .sum::<Result<u64>>()?;
    Ok(AgreementSummary {
        trials: trials as u64,
        disagreements,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CouplingSummary {
    pub runs: u64,
    /// Vertex-level comparisons `Q(H, v) >= Q(G, v)` made.
    pub comparisons: u64,
    pub violations: u64,
}

impl CouplingSummary {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Runs `g` and `h` on `runs` shared stack realizations and counts vertices
/// popped more often in `g` than in `h`.
pub fn monotonicity_check(
    g: &Multigraph,
    h: &Subgraph,
    runs: usize,
    seed: u64,
) -> Result<CouplingSummary> {
    let per_run = (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let src = StackSource::new(derive_seed(seed, i));
            let (on_g, on_h) = coupled_run(g, h, &src, ChoiceRule::QueueFifo)?;
            let violations = h
                .vertex_map
                .iter()
                .enumerate()
                .filter(|&(local, &parent)| on_h.q[local] < on_g.q[parent])
                .count() as u64;
            Ok((h.vertex_map.len() as u64, violations))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CouplingSummary {
        runs: runs as u64,
        comparisons: per_run.iter().map(|r| r.0).sum(),
        violations: per_run.iter().map(|r| r.1).sum(),
    })
}

/// A random proper edge subset of `g` spanning a class-S subgraph, if one
/// turns up within `attempts` draws.
pub fn random_class_s_subgraph(g: &Multigraph, seed: u64, attempts: usize) -> Option<Subgraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = g.edge_count();
    for _ in 0..attempts {
        let keep: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.7)).collect();
        if keep.is_empty() || keep.len() == m {
            continue;
        }
        if let Ok(h) = g.edge_subgraph(&keep) {
            if h.graph.classify().in_class_s {
                return Some(h);
            }
        }
    }
    None
}

/// Pops cycles on `trials` shared stack realizations under both cycle
/// orders and counts realizations where the tree or popped cycle set differ.
pub fn dst_order_check(h: &Digraph, root: usize, trials: usize, seed: u64) -> Result<AgreementSummary> {
    let disagreements = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let src = StackSource::new(derive_seed(seed, i));
            let run = |order| {
                let cfg = DstConfig {
                    order,
                    record_cycles: true,
                    ..DstConfig::default()
                };
                sample_dst_with(h, root, &src, &cfg).map(|mut r| {
                    if let Some(c) = r.cycles.as_mut() {
                        c.sort();
                    }
                    r
                })
            };
            Ok(u64::from(run(CycleOrder::LeastIndex)? != run(CycleOrder::GreatestIndex)?))
        })
        .sum::<Result<u64>>()?;
    Ok(AgreementSummary {
        trials: trials as u64,
        disagreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;

    #[test]
    fn diamond_on_small_graphs() {
        for kind in [GraphKind::Cycle(5), GraphKind::Theta(3), GraphKind::Lollipop(4)] {
            let s = diamond_check(&kind.build().unwrap(), 100, 1).unwrap();
            assert_eq!(s.disagreements, 0, "{kind:?}");
        }
    }

    #[test]
    fn coupling_on_theta() {
        let g = GraphKind::Theta(4).build().unwrap();
        let h = g.edge_subgraph(&[0, 2]).unwrap();
        let s = monotonicity_check(&g, &h, 200, 3).unwrap();
        assert_eq!(s.comparisons, 400);
        assert!(s.pass());
    }

    #[test]
    fn subgraph_search() {
        let g = GraphKind::Complete(5).build().unwrap();
        let h = random_class_s_subgraph(&g, 0, 100).unwrap();
        assert!(h.validate(&g).is_ok());
        assert!(h.graph.edge_count() < g.edge_count());
        // a cycle has no proper class-S subgraph
        assert!(random_class_s_subgraph(&GraphKind::Cycle(5).build().unwrap(), 0, 50).is_none());
    }

    #[test]
    fn cycle_orders_agree() {
        let h = Digraph::bidirected(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(dst_order_check(&h, 0, 100, 2).unwrap().pass());
    }
}
