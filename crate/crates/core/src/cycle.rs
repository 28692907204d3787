//! Cycle popping for uniform directed spanning trees.
//!
//! Every non-root vertex `w` owns a stack of uniformly chosen out-arcs. While
//! the top arcs contain a cycle, pop it (advance the stack of each vertex on
//! it). The set of popped cycles and the final tree do not depend on which
//! cycle is popped first, and the tree is uniform over all directed spanning
//! trees rooted at the chosen vertex.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stacks::StackSource;

/// Directed multigraph; parallel arcs and loops are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    vertex_count: usize,
    arcs: Vec<(usize, usize)>,
    out_arcs: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new<I>(vertex_count: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out_arcs = vec![Vec::new(); vertex_count];
        let mut list = Vec::new();
        for (id, (from, to)) in arcs.into_iter().enumerate() {
            for index in [from, to] {
                if index >= vertex_count {
                    return Err(Error::IndexOutOfRange {
                        index,
                        vertex_count,
                    });
                }
            }
            out_arcs[from].push(id);
            list.push((from, to));
        }
        Ok(Digraph {
            vertex_count,
            arcs: list,
            out_arcs,
        })
    }

    /// Both directions of every undirected pair, in the order `(a,b), (b,a)`.
    pub fn bidirected<I>(vertex_count: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Digraph::new(
            vertex_count,
            pairs.into_iter().flat_map(|(a, b)| [(a, b), (b, a)]),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> (usize, usize) {
        self.arcs[id]
    }

    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out_arcs[v]
    }

    /// Vertices with no directed path to `root`.
    pub fn unable_to_reach(&self, root: usize) -> Vec<usize> {
        let mut into = vec![Vec::new(); self.vertex_count];
        for &(from, to) in &self.arcs {
            into[to].push(from);
        }
        let mut seen = vec![false; self.vertex_count];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &u in &into[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        (0..self.vertex_count).filter(|&v| !seen[v]).collect()
    }

    pub fn require_spanning_tree(&self, root: usize) -> Result<()> {
        if root >= self.vertex_count {
            return Err(Error::IndexOutOfRange {
                index: root,
                vertex_count: self.vertex_count,
            });
        }
        let unreachable = self.unable_to_reach(root);
        if unreachable.is_empty() {
            Ok(())
        } else {
            Err(Error::NoSpanningTree { root, unreachable })
        }
    }
}

/// One out-arc per non-root vertex, forming an in-tree toward `root`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DirectedSpanningTree {
    pub root: usize,
    pub parent_arc: Vec<Option<usize>>,
}

impl DirectedSpanningTree {
    /// Checks the out-degree contract and that every vertex reaches the root
    /// along chosen arcs.
    pub fn is_valid_for(&self, h: &Digraph) -> bool {
        let n = h.vertex_count();
        if self.parent_arc.len() != n || self.root >= n || self.parent_arc[self.root].is_some() {
            return false;
        }
        for (w, arc) in self.parent_arc.iter().enumerate() {
            if w == self.root {
                continue;
            }
            match arc {
                Some(a) if *a < h.arc_count() && h.arc(*a).0 == w => {}
                _ => return false,
            }
        }
        (0..n).all(|start| {
            let mut v = start;
            for _ in 0..n {
                if v == self.root {
                    return true;
                }
                v = h.arc(self.parent_arc[v].unwrap()).1;
            }
            v == self.root
        })
    }

    pub fn arcs(&self) -> Vec<usize> {
        self.parent_arc.iter().flatten().copied().collect()
    }
}

/// Which unresolved vertex starts the next search for a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CycleOrder {
    #[default]
    LeastIndex,
    GreatestIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DstConfig {
    pub order: CycleOrder,
    pub max_cycle_pops: u64,
    pub record_cycles: bool,
}

impl Default for DstConfig {
    fn default() -> Self {
        DstConfig {
            order: CycleOrder::LeastIndex,
            max_cycle_pops: 10_000_000,
            record_cycles: false,
        }
    }
}

/// A popped cycle as `(vertex, stack depth)` pairs, sorted.
pub type PoppedCycle = Vec<(usize, u64)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclePopRun {
    pub tree: DirectedSpanningTree,
    pub cycles_popped: u64,
    pub cycles: Option<Vec<PoppedCycle>>,
}

/// Uniform directed spanning tree of `(h, root)` from seed `seed`.
pub fn sample_dst(h: &Digraph, root: usize, seed: u64) -> Result<DirectedSpanningTree> {
    sample_dst_with(h, root, &StackSource::new(seed), &DstConfig::default()).map(|r| r.tree)
}

pub fn sample_dst_with(
    h: &Digraph,
    root: usize,
    src: &StackSource,
    cfg: &DstConfig,
) -> Result<CyclePopRun> {
    h.require_spanning_tree(root)?;
    let n = h.vertex_count();
    let mut depth = vec![0u64; n];
    let top_arc = |w: usize, depth: &[u64]| {
        let out = h.out_arcs(w);
        out[src.arc_choice(w, depth[w], out.len())]
    };

    let mut in_tree = vec![false; n];
    in_tree[root] = true;
    let mut position = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut cycles_popped = 0u64;
    let mut cycles = cfg.record_cycles.then(Vec::new);

    let starts: Box<dyn Iterator<Item = usize>> = match cfg.order {
        CycleOrder::LeastIndex => Box::new(0..n),
        CycleOrder::GreatestIndex => Box::new((0..n).rev()),
    };
    for start in starts {
        while !in_tree[start] {
            let mut u = start;
            while !in_tree[u] && position[u] == usize::MAX {
                position[u] = path.len();
                path.push(u);
                u = h.arc(top_arc(u, &depth)).1;
            }
            if in_tree[u] {
                for &w in &path {
                    in_tree[w] = true;
                }
            } else {
                if cycles_popped == cfg.max_cycle_pops {
                    return Err(Error::PopCapExceeded {
                        cap: cfg.max_cycle_pops,
                    });
                }
                cycles_popped += 1;
                let on_cycle = &path[position[u]..];
                if let Some(list) = cycles.as_mut() {
                    let mut c: PoppedCycle = on_cycle.iter().map(|&w| (w, depth[w])).collect();
                    c.sort_unstable();
                    list.push(c);
                }
                for &w in on_cycle {
                    depth[w] += 1;
                }
            }
            for &w in &path {
                position[w] = usize::MAX;
            }
            path.clear();
        }
    }

    let parent_arc = (0..n)
        .map(|w| (w != root).then(|| top_arc(w, &depth)))
        .collect();
    Ok(CyclePopRun {
        tree: DirectedSpanningTree { root, parent_arc },
        cycles_popped,
        cycles,
    })
}
