use proptest::prelude::*;

use sinkpop::format::{parse_edge_list, parse_orientation, write_edge_list, write_orientation};
use sinkpop::graph::{GraphKind, Multigraph, Orientation};
use sinkpop::popper::{replay, sample_stacked, ChoiceRule, PopperConfig};
use sinkpop::stacks::{SequentialBits, StackSource};

fn class_s_graph() -> impl Strategy<Value = Multigraph> {
    (1usize..8, 0usize..6, any::<u64>()).prop_map(|(n, extra, seed)| {
        let m = if n == 1 { 1 } else { n + extra };
        GraphKind::Random { n, m, seed }.build().unwrap()
    })
}

fn any_orientation(g: &Multigraph, seed: u64) -> Orientation {
    let mut bits = SequentialBits::new(seed);
    let raw = (0..g.edge_count())
        .map(|e| if g.is_self_loop(e) { 0 } else { bits.next_bit() })
        .collect();
    Orientation::from_bits(g, raw).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn out_degrees_sum_to_edge_count(g in class_s_graph(), seed in any::<u64>()) {
        let o = any_orientation(&g, seed);
        prop_assert_eq!(o.out_degrees(&g).iter().sum::<usize>(), g.edge_count());
        prop_assert_eq!(o.in_degrees(&g).iter().sum::<usize>(), g.edge_count());
    }

    #[test]
    fn sinks_are_never_adjacent(g in class_s_graph(), seed in any::<u64>()) {
        let o = any_orientation(&g, seed);
        for e in g.edges() {
            if !e.is_loop() {
                prop_assert!(!(o.is_sink(&g, e.a) && o.is_sink(&g, e.b)));
            }
        }
    }

    #[test]
    fn reversal_swaps_sinks_and_sources(g in class_s_graph(), seed in any::<u64>()) {
        let o = any_orientation(&g, seed);
        let r = o.reversed(&g);
        prop_assert_eq!(r.sinks(&g), o.sources(&g));
        prop_assert_eq!(r.reversed(&g), o);
    }

    #[test]
    fn classification_ignores_labels(
        n in 1usize..8,
        m in 0usize..10,
        seed in any::<u64>(),
        shift in 0usize..8,
    ) {
        let mut bits = SequentialBits::new(seed);
        let mut draw = |k: usize| (0..6).fold(0, |acc, _| 2 * acc + bits.next_bit() as usize) % k;
        let mut pairs: Vec<(usize, usize)> = (0..m).map(|_| (draw(n), draw(n))).collect();
        pairs.sort();
        pairs.dedup_by(|a, b| a.0 == a.1 && a == b);
        let Ok(g) = Multigraph::new(n, pairs.clone()) else { return Ok(()); };
        let relabel = |v: usize| (n - 1 - v + shift) % n;
        let h = Multigraph::new(n, pairs.iter().map(|&(a, b)| (relabel(a), relabel(b)))).unwrap();
        let (rg, rh) = (g.classify(), h.classify());
        prop_assert_eq!(rg.in_class_s, rh.in_class_s);
        let mut mapped: Vec<Vec<usize>> = rg
            .tree_components
            .iter()
            .map(|c| { let mut c: Vec<usize> = c.iter().map(|&v| relabel(v)).collect(); c.sort(); c })
            .collect();
        mapped.sort();
        let mut theirs = rh.tree_components.clone();
        theirs.sort();
        prop_assert_eq!(mapped, theirs);
    }

    #[test]
    fn every_rule_gives_the_same_outcome(g in class_s_graph(), seed in any::<u64>()) {
        let src = StackSource::new(seed);
        let cfg = PopperConfig { rule_seed: seed, ..PopperConfig::default() };
        let runs: Vec<_> = ChoiceRule::ALL
            .iter()
            .map(|&r| sample_stacked(&g, &src, r, &cfg).unwrap())
            .collect();
        for r in &runs[1..] {
            prop_assert_eq!(r.tau, runs[0].tau);
            prop_assert_eq!(&r.q, &runs[0].q);
            prop_assert_eq!(&r.sfo, &runs[0].sfo);
            prop_assert_eq!(r.pop_work, runs[0].pop_work);
        }
        prop_assert!(runs[0].sfo.is_sink_free(&g));
    }

    #[test]
    fn recorded_sequences_replay(g in class_s_graph(), seed in any::<u64>(), rule in 0usize..4) {
        let src = StackSource::new(seed);
        let r = sample_stacked(&g, &src, ChoiceRule::ALL[rule], &PopperConfig::recording()).unwrap();
        let seq = r.popped_sequence.clone().unwrap();
        prop_assert_eq!(seq.len() as u64, r.tau);
        prop_assert_eq!(replay(&g, &src, &seq), Ok(r.sfo));
    }

    #[test]
    fn formats_round_trip(g in class_s_graph(), seed in any::<u64>()) {
        prop_assert_eq!(&parse_edge_list(&write_edge_list(&g)).unwrap(), &g);
        let o = any_orientation(&g, seed);
        prop_assert_eq!(parse_orientation(&g, &write_orientation(&g, &o)).unwrap(), o);
    }
}
