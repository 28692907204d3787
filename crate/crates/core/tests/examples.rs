//! Worked small cases with values fixed by hand or by the exact chain.

use num_rational::BigRational;

use sinkpop::graph::{GraphKind, Multigraph, Orientation};
use sinkpop::harness::stats::{chi_square_two_sample, ALPHA};
use sinkpop::harness::{
    run_conditional_cycle_experiment, run_extremal_conditional_experiment, Histogram, Verdict,
};
use sinkpop::oracle::{ChainRule, ChainValue, ExactChain, Init};
use sinkpop::popper::{sample_fast, ChoiceRule, PopperConfig};
use sinkpop::Error;

fn chain(g: &Multigraph) -> ExactChain {
    ExactChain::build(g, &ChainRule::min_vertex_id(g.vertex_count())).unwrap()
}

#[test]
fn six_cycle_pointing_at_a_vertex() {
    // arrows 1->0, 2->1, 3->2, 3->4, 4->5, 5->0
    let g = GraphKind::Cycle(6).build().unwrap();
    let o = Orientation::from_bits(&g, vec![0, 0, 0, 1, 1, 1]).unwrap();
    let q = chain(&g).expected_q(0, &Init::Fixed(o)).unwrap();
    assert_eq!(q.exact, Some(BigRational::new(9.into(), 2.into())));
}

#[test]
fn lollipop_started_sink_free_never_pops() {
    let g = GraphKind::Lollipop(4).build().unwrap();
    let sfo = Orientation::from_bits(&g, vec![1, 1, 1, 0]).unwrap();
    assert!(sfo.is_sink_free(&g));
    assert_eq!(chain(&g).expected_tau(&Init::Fixed(sfo)).unwrap(), ChainValue::integer(0));
}

#[test]
fn conditional_cycle_examples() {
    let r = run_conditional_cycle_experiment(4, 2, 20_000, 3).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!((r.mean.unwrap() - 8.0).abs() < 0.3);
    let r = run_conditional_cycle_experiment(5, 1, 20_000, 4).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!((r.mean.unwrap() - 8.0).abs() < 0.3);
}

#[test]
fn extremal_report_values() {
    let r = run_extremal_conditional_experiment(4).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.mean, Some(12.0));
    assert_eq!(r.details["lollipop_argmax"], serde_json::json!([0]));
    assert_eq!(r.details["cycle_equality"], true);
}

#[test]
fn k2_is_rejected_with_its_tree() {
    let g = Multigraph::new(2, [(0, 1)]).unwrap();
    let err = sample_fast(&g, 0, ChoiceRule::QueueFifo, &PopperConfig::default()).unwrap_err();
    assert_eq!(
        err,
        Error::NotInClassS {
            tree_components: vec![vec![0, 1]]
        }
    );
    assert!(err.to_string().contains("{0,1}"));
}

#[test]
fn pop_count_is_independent_of_the_outcome() {
    // theta(3): split tau samples by which of the six outcomes was reached
    let g = GraphKind::Theta(3).build().unwrap();
    let cfg = PopperConfig::default();
    let mut by_outcome: Vec<Vec<u64>> = vec![Vec::new(); 2];
    for seed in 0..60_000u64 {
        let r = sample_fast(&g, seed, ChoiceRule::QueueFifo, &cfg).unwrap();
        // outcomes with two edges toward vertex 1 versus one
        let toward_one = r.sfo.bits().iter().filter(|&&b| b == 1).count();
        by_outcome[usize::from(toward_one == 2)].push(r.tau);
    }
    let a = Histogram::of_integers(by_outcome[0].iter().copied());
    let b = Histogram::of_integers(by_outcome[1].iter().copied());
    assert!(chi_square_two_sample(&a.counts, &b.counts, ALPHA).unwrap().pass);
}
