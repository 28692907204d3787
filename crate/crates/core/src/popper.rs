//! Sink popping.
//!
//! Start from a random orientation; while some vertex is a sink, pick one
//! and redraw the direction of every edge at it. The first sink-free
//! orientation reached is exactly uniform over all sink-free orientations of
//! the graph, whatever rule picks the sink.
//!
//! A run keeps a list of current sinks and an out-degree table. Popping `v`
//! touches only `v`'s edges: each redrawn edge that now points away from `v`
//! lowers the out-degree of the neighbor, and a neighbor whose out-degree
//! reaches zero is appended to the sink list. Two sinks never share an edge,
//! so no other list entry can go stale. Each pop costs `O(deg(v))`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Multigraph, Orientation, Subgraph};
use crate::stacks::{derive_seed, orientation_at, Remapped, SequentialBits, Stacks};

/// Policy for picking which current sink to pop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChoiceRule {
    /// First sink in discovery order.
    QueueFifo,
    /// Lowest-numbered current sink.
    MinVertexId,
    /// Most recently discovered sink.
    LifoStack,
    /// Uniform among current sinks, drawn from a stream separate from the
    /// edge stacks.
    UniformRandomSink,
}

impl ChoiceRule {
    pub const ALL: [ChoiceRule; 4] = [
        ChoiceRule::QueueFifo,
        ChoiceRule::MinVertexId,
        ChoiceRule::LifoStack,
        ChoiceRule::UniformRandomSink,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChoiceRule::QueueFifo => "fifo",
            ChoiceRule::MinVertexId => "min",
            ChoiceRule::LifoStack => "lifo",
            ChoiceRule::UniformRandomSink => "uniform",
        }
    }
}

impl std::str::FromStr for ChoiceRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChoiceRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown choice rule `{s}` (expected fifo, min, lifo or uniform)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PopperConfig {
    /// Abort with [`Error::PopCapExceeded`] after this many pops. `None`
    /// means `64 n^2`.
    pub max_pops: Option<u64>,
    pub record_sequence: bool,
    /// Mixed into the seed of the [`ChoiceRule::UniformRandomSink`] stream.
    pub rule_seed: u64,
}

impl Default for PopperConfig {
    fn default() -> Self {
        PopperConfig {
            max_pops: None,
            record_sequence: false,
            rule_seed: 0,
        }
    }
}

impl PopperConfig {
    pub fn recording() -> Self {
        PopperConfig {
            record_sequence: true,
            ..Self::default()
        }
    }

    pub fn pop_cap(&self, g: &Multigraph) -> u64 {
        let n = g.vertex_count() as u64;
        self.max_pops.unwrap_or(64 * n * n)
    }
}

/// Outcome of one popping run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PopResult {
    pub sfo: Orientation,
    /// Number of pops.
    pub tau: u64,
    /// Times each vertex was popped.
    pub q: Vec<u64>,
    pub popped_sequence: Option<Vec<usize>>,
    /// Sum of `deg(v)` over popped vertices.
    pub pop_work: u64,
}

impl PopResult {
    /// Popped vertices as a sorted multiset.
    pub fn pop_multiset(&self) -> Vec<usize> {
        self.q
            .iter()
            .enumerate()
            .flat_map(|(v, &c)| std::iter::repeat_n(v, c as usize))
            .collect()
    }
}

enum SinkSet {
    Fifo(VecDeque<usize>),
    Min(BinaryHeap<Reverse<usize>>),
    Lifo(Vec<usize>),
    Uniform(Vec<usize>, ChaCha8Rng),
}

impl SinkSet {
    fn new(rule: ChoiceRule, rule_stream: u64) -> Self {
        match rule {
            ChoiceRule::QueueFifo => SinkSet::Fifo(VecDeque::new()),
            ChoiceRule::MinVertexId => SinkSet::Min(BinaryHeap::new()),
            ChoiceRule::LifoStack => SinkSet::Lifo(Vec::new()),
            ChoiceRule::UniformRandomSink => {
                SinkSet::Uniform(Vec::new(), ChaCha8Rng::seed_from_u64(rule_stream))
            }
        }
    }

    fn push(&mut self, v: usize) {
        match self {
            SinkSet::Fifo(q) => q.push_back(v),
            SinkSet::Min(h) => h.push(Reverse(v)),
            SinkSet::Lifo(s) => s.push(v),
            SinkSet::Uniform(items, _) => items.push(v),
        }
    }

    fn take(&mut self) -> Option<usize> {
        match self {
            SinkSet::Fifo(q) => q.pop_front(),
            SinkSet::Min(h) => h.pop().map(|Reverse(v)| v),
            SinkSet::Lifo(s) => s.pop(),
            SinkSet::Uniform(items, rng) => {
                if items.is_empty() {
                    None
                } else {
                    let i = rng.random_range(0..items.len());
                    Some(items.swap_remove(i))
                }
            }
        }
    }
}

/// The popping loop. `draw(e, k)` supplies the depth-`k` bit of edge `e`;
/// it is never called for self-loops.
fn pop_until_sink_free<F>(
    g: &Multigraph,
    rule: ChoiceRule,
    rule_stream: u64,
    cfg: &PopperConfig,
    mut draw: F,
) -> Result<PopResult>
where
    F: FnMut(usize, u64) -> u8,
{
    let n = g.vertex_count();
    let m = g.edge_count();
    let edges = g.edges();
    let mut depth = vec![0u64; m];
    let mut bits: Vec<u8> = (0..m)
        .map(|e| if edges[e].is_loop() { 0 } else { draw(e, 0) })
        .collect();
    let mut out_degree = vec![0usize; n];
    for (e, edge) in edges.iter().enumerate() {
        out_degree[edge.tail(bits[e])] += 1;
    }

    let mut sinks = SinkSet::new(rule, rule_stream);
    for v in 0..n {
        if out_degree[v] == 0 {
            sinks.push(v);
        }
    }

    let cap = cfg.pop_cap(g);
    let mut tau = 0u64;
    let mut q = vec![0u64; n];
    let mut pop_work = 0u64;
    let mut sequence = cfg.record_sequence.then(Vec::new);

    while let Some(v) = sinks.take() {
        debug_assert_eq!(out_degree[v], 0);
        if tau == cap {
            return Err(Error::PopCapExceeded { cap });
        }
        tau += 1;
        q[v] += 1;
        pop_work += g.degree(v) as u64;
        if let Some(seq) = sequence.as_mut() {
            seq.push(v);
        }
        for &e in g.incident(v) {
            depth[e] += 1;
            let b = draw(e, depth[e]);
            if b != bits[e] {
                bits[e] = b;
                let w = edges[e].other(v);
                out_degree[v] += 1;
                out_degree[w] -= 1;
                if out_degree[w] == 0 {
                    sinks.push(w);
                }
            }
        }
        if out_degree[v] == 0 {
            sinks.push(v);
        }
    }

    Ok(PopResult {
        sfo: Orientation::from_bits_unchecked(bits),
        tau,
        q,
        popped_sequence: sequence,
        pop_work,
    })
}

/// Production sampler: fair bits from a sequential stream seeded by `seed`.
pub fn sample_fast(
    g: &Multigraph,
    seed: u64,
    rule: ChoiceRule,
    cfg: &PopperConfig,
) -> Result<PopResult> {
    g.require_class_s()?;
    let mut stream = SequentialBits::new(seed);
    let rule_stream = derive_seed(seed, 1 + cfg.rule_seed);
    pop_until_sink_free(g, rule, rule_stream, cfg, |_, _| stream.next_bit())
}

/// Like [`sample_fast`] but starting from `initial` instead of a random
/// orientation.
pub fn sample_fast_from(
    g: &Multigraph,
    initial: &Orientation,
    seed: u64,
    rule: ChoiceRule,
    cfg: &PopperConfig,
) -> Result<PopResult> {
    g.require_class_s()?;
    if initial.len() != g.edge_count() {
        return Err(Error::InvalidOrientation(format!(
            "expected {} entries, got {}",
            g.edge_count(),
            initial.len()
        )));
    }
    let mut stream = SequentialBits::new(seed);
    let rule_stream = derive_seed(seed, 1 + cfg.rule_seed);
    pop_until_sink_free(g, rule, rule_stream, cfg, |e, k| {
        if k == 0 {
            initial.bit(e)
        } else {
            stream.next_bit()
        }
    })
}

/// Replayable sampler reading `X[e][k]` from `src`. The whole run is a
/// function of `(g, src, rule, cfg.rule_seed)`.
pub fn sample_stacked<S: Stacks + ?Sized>(
    g: &Multigraph,
    src: &S,
    rule: ChoiceRule,
    cfg: &PopperConfig,
) -> Result<PopResult> {
    g.require_class_s()?;
    let rule_stream = derive_seed(cfg.rule_seed, 1);
    pop_until_sink_free(g, rule, rule_stream, cfg, |e, k| orientation_at(src, g, e, k))
}

/// Runs `g` and its subgraph `h` on the same stacks: an edge of `h` reads the
/// stack of the `g` edge it maps to.
pub fn coupled_run<S: Stacks + ?Sized>(
    g: &Multigraph,
    h: &Subgraph,
    src: &S,
    rule: ChoiceRule,
) -> Result<(PopResult, PopResult)> {
    h.validate(g)?;
    g.require_class_s()?;
    h.graph.require_class_s()?;
    let cfg = PopperConfig::recording();
    let on_g = sample_stacked(g, src, rule, &cfg)?;
    let on_h = sample_stacked(&h.graph, &Remapped::new(src, &h.edge_map), rule, &cfg)?;
    Ok((on_g, on_h))
}

/// Replays a pop sequence on fixed stacks. Returns the final orientation, or
/// `Err(i)` if the `i`-th pop targets a vertex that is not a sink.
pub fn replay<S: Stacks + ?Sized>(
    g: &Multigraph,
    src: &S,
    sequence: &[usize],
) -> std::result::Result<Orientation, usize> {
    let mut depth = vec![0u64; g.edge_count()];
    let current = |depth: &[u64]| {
        Orientation::from_bits_unchecked(
            (0..g.edge_count())
                .map(|e| orientation_at(src, g, e, depth[e]))
                .collect(),
        )
    };
    for (i, &v) in sequence.iter().enumerate() {
        if v >= g.vertex_count() || !current(&depth).is_sink(g, v) {
            return Err(i);
        }
        for &e in g.incident(v) {
            depth[e] += 1;
        }
    }
    Ok(current(&depth))
}
