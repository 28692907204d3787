//! Reading and writing edge lists and orientations.

use sinkpop::format::{parse_edge_list, parse_orientation, write_orientation};
use sinkpop::popper::{sample_fast, ChoiceRule, PopperConfig};

const BOWTIE: &str = "\
# two triangles sharing vertex 2
5 6
0 1
1 2
2 0
2 3
3 4
4 2
";

fn main() -> sinkpop::Result<()> {
    let g = parse_edge_list(BOWTIE)?;
    let run = sample_fast(&g, 3, ChoiceRule::MinVertexId, &PopperConfig::default())?;
    let text = write_orientation(&g, &run.sfo);
    print!("{text}");
    assert_eq!(parse_orientation(&g, &text)?, run.sfo);
    Ok(())
}
