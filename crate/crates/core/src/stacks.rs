//! Randomness for popping algorithms.
//!
//! Every edge `e` owns an infinite stack of fair orientation bits `X[e][k]`.
//! [`StackSource`] computes any entry on demand from `(seed, e, k)` with a
//! counter-based mixing function, so a run can be replayed under a different
//! choice rule, on a subgraph, or with a substituted top layer without ever
//! storing the stacks. [`SequentialBits`] is the unaddressed stream used by
//! the production sampler.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Multigraph, Orientation};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const EDGE_KEY: u64 = 0xd6e8_feb8_6659_fd93;
const DEPTH_KEY: u64 = 0xa076_1d64_78bd_642f;
const ARC_DOMAIN: u64 = 0x5851_f42d_4c95_7f2d;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn hash3(seed: u64, a: u64, b: u64) -> u64 {
    let h = mix64(seed.wrapping_add(GOLDEN));
    let h = mix64(h ^ a.wrapping_mul(EDGE_KEY));
    mix64(h ^ b.wrapping_mul(DEPTH_KEY).wrapping_add(GOLDEN))
}

/// Independent child seed for replicate or stream `index` of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    hash3(seed, index, 0x243f_6a88_85a3_08d3)
}

/// Read access to the stack entries `X[e][k]`.
pub trait Stacks {
    /// Raw direction bit at depth `depth` of edge `edge`'s stack.
    fn bit(&self, edge: usize, depth: u64) -> u8;
}

impl<S: Stacks + ?Sized> Stacks for &S {
    fn bit(&self, edge: usize, depth: u64) -> u8 {
        (**self).bit(edge, depth)
    }
}

/// Pure pseudorandom stacks keyed by a 64-bit seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StackSource {
    seed: u64,
}

impl StackSource {
    pub fn new(seed: u64) -> Self {
        StackSource { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform index in `0..out_degree` for depth `depth` of vertex `vertex`'s
    /// arc stack. Rejection sampling removes modulo bias.
    pub fn arc_choice(&self, vertex: usize, depth: u64, out_degree: usize) -> usize {
        assert!(out_degree > 0, "arc stack of a vertex with no out-arcs");
        let d = out_degree as u64;
        let zone = u64::MAX - (u64::MAX % d + 1) % d;
        let key = self.seed ^ ARC_DOMAIN;
        let mut attempt = 0u64;
        loop {
            let x = hash3(key, vertex as u64, depth.wrapping_mul(0x1_0000).wrapping_add(attempt));
            if x <= zone {
                return (x % d) as usize;
            }
            attempt += 1;
        }
    }
}

impl Stacks for StackSource {
    fn bit(&self, edge: usize, depth: u64) -> u8 {
        let word = hash3(self.seed, edge as u64, depth >> 6);
        ((word >> (depth & 63)) & 1) as u8
    }
}

/// `X[e][k]` as seen on graph `g`: self-loops always report `0`.
pub fn orientation_at<S: Stacks + ?Sized>(src: &S, g: &Multigraph, edge: usize, depth: u64) -> u8 {
    if g.is_self_loop(edge) {
        0
    } else {
        src.bit(edge, depth)
    }
}

/// Current stack depth `f(e)` of every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackPointer {
    depth: Vec<u64>,
}

impl StackPointer {
    pub fn new(edge_count: usize) -> Self {
        StackPointer {
            depth: vec![0; edge_count],
        }
    }

    pub fn depth(&self, edge: usize) -> u64 {
        self.depth[edge]
    }

    pub fn depths(&self) -> &[u64] {
        &self.depth
    }

    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    /// Pops vertex `v`: every edge incident to `v` moves one entry down.
    pub fn pop_vertex(&mut self, g: &Multigraph, v: usize) {
        for &e in g.incident(v) {
            self.depth[e] += 1;
        }
    }
}

/// The orientation `{X[e][f(e)]}` currently on top of the stacks.
pub fn current_orientation<S: Stacks + ?Sized>(
    src: &S,
    ptr: &StackPointer,
    g: &Multigraph,
) -> Orientation {
    assert_eq!(ptr.len(), g.edge_count(), "stack pointer sized for another graph");
    let bits = (0..g.edge_count())
        .map(|e| orientation_at(src, g, e, ptr.depth(e)))
        .collect();
    Orientation::from_bits_unchecked(bits)
}

/// Stacks whose top layer is replaced by a fixed orientation. Deeper entries
/// come from `inner` unchanged, which amounts to conditioning on the initial
/// orientation.
#[derive(Debug, Clone, Copy)]
pub struct WithInitial<'a, S> {
    inner: S,
    initial: &'a [u8],
}

impl<'a, S: Stacks> WithInitial<'a, S> {
    pub fn new(inner: S, initial: &'a Orientation) -> Self {
        WithInitial {
            inner,
            initial: initial.bits(),
        }
    }
}

impl<S: Stacks> Stacks for WithInitial<'_, S> {
    fn bit(&self, edge: usize, depth: u64) -> u8 {
        if depth == 0 {
            self.initial[edge]
        } else {
            self.inner.bit(edge, depth)
        }
    }
}

/// Stacks of a subgraph read through the parent graph's edge ids.
#[derive(Debug, Clone, Copy)]
pub struct Remapped<'a, S> {
    inner: S,
    edge_map: &'a [usize],
}

impl<'a, S: Stacks> Remapped<'a, S> {
    pub fn new(inner: S, edge_map: &'a [usize]) -> Self {
        Remapped { inner, edge_map }
    }
}

impl<S: Stacks> Stacks for Remapped<'_, S> {
    fn bit(&self, edge: usize, depth: u64) -> u8 {
        self.inner.bit(self.edge_map[edge], depth)
    }
}

/// Hand-written stack prefixes, continued by a seeded source below the given
/// entries.
#[derive(Debug, Clone)]
pub struct ExplicitStacks {
    stacks: Vec<Vec<u8>>,
    below: StackSource,
}

impl ExplicitStacks {
    pub fn new(stacks: Vec<Vec<u8>>, below_seed: u64) -> Self {
        ExplicitStacks {
            stacks,
            below: StackSource::new(below_seed),
        }
    }
}

impl Stacks for ExplicitStacks {
    fn bit(&self, edge: usize, depth: u64) -> u8 {
        match self.stacks.get(edge).and_then(|s| s.get(depth as usize)) {
            Some(&b) => b,
            None => self.below.bit(edge, depth),
        }
    }
}

/// Unaddressed fair bits from a ChaCha stream, 64 per generator call.
#[derive(Debug, Clone)]
pub struct SequentialBits {
    rng: ChaCha8Rng,
    word: u64,
    left: u32,
}

impl SequentialBits {
    pub fn new(seed: u64) -> Self {
        SequentialBits {
            rng: ChaCha8Rng::seed_from_u64(seed),
            word: 0,
            left: 0,
        }
    }

    pub fn next_bit(&mut self) -> u8 {
        if self.left == 0 {
            self.word = self.rng.next_u64();
            self.left = 64;
        }
        let b = (self.word & 1) as u8;
        self.word >>= 1;
        self.left -= 1;
        b
    }
}
