//! On a fixed stack realization the pop multiset, the pop count and the
//! final orientation do not depend on which sink is popped first.

use sinkpop::graph::GraphKind;
use sinkpop::popper::{sample_stacked, ChoiceRule, PopperConfig};
use sinkpop::stacks::StackSource;

fn main() -> sinkpop::Result<()> {
    let g = GraphKind::Lollipop(5).build()?;
    let src = StackSource::new(12);
    for rule in ChoiceRule::ALL {
        let r = sample_stacked(&g, &src, rule, &PopperConfig::recording())?;
        println!(
            "{:>7}: tau {:>3}  order {:?}\n         multiset {:?}",
            rule.name(),
            r.tau,
            r.popped_sequence.as_ref().unwrap(),
            r.pop_multiset()
        );
    }
    Ok(())
}
