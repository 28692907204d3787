//! Undirected multigraphs with self-loops, their orientations, and the named
//! graph families used throughout the crate.
//!
//! Edges are identified by their position in the input list. An orientation
//! stores one bit per edge: `0` puts the head on the edge's first endpoint,
//! `1` on its second. Self-loops always carry `0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    /// The endpoint that is not `v`. For a self-loop this is `v` itself.
    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    /// Head of the edge under direction bit `bit`.
    pub fn head(&self, bit: u8) -> usize {
        if bit == 0 {
            self.a
        } else {
            self.b
        }
    }

    pub fn tail(&self, bit: u8) -> usize {
        if bit == 0 {
            self.b
        } else {
            self.a
        }
    }

    /// The direction bit that makes `v` the head.
    pub fn bit_toward(&self, v: usize) -> u8 {
        if self.a == v {
            0
        } else {
            1
        }
    }
}

/// Immutable undirected multigraph. Parallel edges are allowed, as is at most
/// one self-loop per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    incidence: Vec<Vec<usize>>,
    self_loop: Vec<Option<usize>>,
}

impl Multigraph {
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut incidence = vec![Vec::new(); vertex_count];
        let mut self_loop = vec![None; vertex_count];
        let mut list = Vec::new();
        for (id, (a, b)) in edges.into_iter().enumerate() {
            for index in [a, b] {
                if index >= vertex_count {
                    return Err(Error::IndexOutOfRange {
                        index,
                        vertex_count,
                    });
                }
            }
            if a == b {
                if self_loop[a].is_some() {
                    return Err(Error::DuplicateSelfLoop { vertex: a });
                }
                self_loop[a] = Some(id);
                incidence[a].push(id);
            } else {
                incidence[a].push(id);
                incidence[b].push(id);
            }
            list.push(Edge { a, b });
        }
        Ok(Multigraph {
            vertex_count,
            edges: list,
            incidence,
            self_loop,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of edges that are not self-loops.
    pub fn proper_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_loop()).count()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    /// Edge ids incident to `v`; a self-loop appears once.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    /// Degree not counting the self-loop.
    pub fn deg0(&self, v: usize) -> usize {
        self.degree(v) - usize::from(self.self_loop[v].is_some())
    }

    pub fn has_self_loop(&self, v: usize) -> bool {
        self.self_loop[v].is_some()
    }

    pub fn is_self_loop(&self, e: usize) -> bool {
        self.edges[e].is_loop()
    }

    /// Connected components, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut out = Vec::new();
        for start in 0..self.vertex_count {
            if label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            label[start] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for &e in &self.incidence[v] {
                    let w = self.edges[e].other(v);
                    if label[w] == usize::MAX {
                        label[w] = id;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Reports which components are trees. Graphs in class S, those with no
    /// tree component, are exactly the graphs that admit a sink-free
    /// orientation.
    pub fn classify(&self) -> GraphClassReport {
        let mut tree_components = Vec::new();
        for comp in self.components() {
            // self-loops count once per edge; each proper edge is listed at both ends
            let twice_edges: usize = comp
                .iter()
                .map(|&v| self.deg0(v) + 2 * usize::from(self.has_self_loop(v)))
                .sum();
            if twice_edges / 2 + 1 == comp.len() {
                tree_components.push(comp);
            }
        }
        GraphClassReport {
            in_class_s: tree_components.is_empty(),
            tree_components,
        }
    }

    pub fn require_class_s(&self) -> Result<()> {
        let report = self.classify();
        if report.in_class_s {
            Ok(())
        } else {
            Err(Error::NotInClassS {
                tree_components: report.tree_components,
            })
        }
    }

    /// The subgraph spanned by the given edge ids, keeping only vertices those
    /// edges touch. Vertex and edge ids are renumbered in increasing order.
    pub fn edge_subgraph(&self, edge_ids: &[usize]) -> Result<Subgraph> {
        let mut ids = edge_ids.to_vec();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotASubgraph("repeated edge id".into()));
        }
        if let Some(&bad) = ids.iter().find(|&&e| e >= self.edges.len()) {
            return Err(Error::NotASubgraph(format!(
                "edge id {bad} not in a graph with {} edges",
                self.edges.len()
            )));
        }
        let mut keep = vec![false; self.vertex_count];
        for &e in &ids {
            keep[self.edges[e].a] = true;
            keep[self.edges[e].b] = true;
        }
        let vertex_map: Vec<usize> = (0..self.vertex_count).filter(|&v| keep[v]).collect();
        let mut local = vec![usize::MAX; self.vertex_count];
        for (i, &v) in vertex_map.iter().enumerate() {
            local[v] = i;
        }
        let graph = Multigraph::new(
            vertex_map.len(),
            ids.iter().map(|&e| (local[self.edges[e].a], local[self.edges[e].b])),
        )?;
        Ok(Subgraph {
            graph,
            vertex_map,
            edge_map: ids,
        })
    }

    pub fn generate(kind: GraphKind) -> Result<Self> {
        kind.build()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphClassReport {
    pub in_class_s: bool,
    pub tree_components: Vec<Vec<usize>>,
}

/// A subgraph together with the ids its vertices and edges carry in the
/// parent graph. Edge endpoint order is preserved, so a direction bit means
/// the same thing in both graphs.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Multigraph,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

impl Subgraph {
    /// Checks that `sub` is a subgraph of `parent` under the stated maps.
    pub fn validate(&self, parent: &Multigraph) -> Result<()> {
        if self.vertex_map.len() != self.graph.vertex_count()
            || self.edge_map.len() != self.graph.edge_count()
        {
            return Err(Error::NotASubgraph("map sizes do not match the subgraph".into()));
        }
        let mut seen = vec![false; parent.edge_count()];
        for (local, &pe) in self.edge_map.iter().enumerate() {
            if pe >= parent.edge_count() || std::mem::replace(&mut seen[pe], true) {
                return Err(Error::NotASubgraph(format!("bad parent edge id {pe}")));
            }
            let le = self.graph.edge(local);
            let pe = parent.edge(pe);
            if self.vertex_map[le.a] != pe.a || self.vertex_map[le.b] != pe.b {
                return Err(Error::NotASubgraph(format!(
                    "edge {local} endpoints disagree with parent edge"
                )));
            }
        }
        if self.vertex_map.iter().any(|&v| v >= parent.vertex_count()) {
            return Err(Error::NotASubgraph("vertex id out of range".into()));
        }
        Ok(())
    }

    /// The whole graph viewed as a subgraph of itself.
    pub fn identity(g: &Multigraph) -> Self {
        Subgraph {
            graph: g.clone(),
            vertex_map: (0..g.vertex_count()).collect(),
            edge_map: (0..g.edge_count()).collect(),
        }
    }
}

/// Per-edge direction bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Orientation {
    bits: Vec<u8>,
}

impl Orientation {
    /// Validates length, bit values, and the fixed self-loop bit.
    pub fn from_bits(g: &Multigraph, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != g.edge_count() {
            return Err(Error::InvalidOrientation(format!(
                "expected {} entries, got {}",
                g.edge_count(),
                bits.len()
            )));
        }
        for (e, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::InvalidOrientation(format!("edge {e} has bit {b}")));
            }
            if b == 1 && g.is_self_loop(e) {
                return Err(Error::InvalidOrientation(format!(
                    "self-loop {e} must carry bit 0"
                )));
            }
        }
        Ok(Orientation { bits })
    }

    pub(crate) fn from_bits_unchecked(bits: Vec<u8>) -> Self {
        Orientation { bits }
    }

    /// Orientation with every edge's head on its first endpoint.
    pub fn zeros(g: &Multigraph) -> Self {
        Orientation {
            bits: vec![0; g.edge_count()],
        }
    }

    /// Orientation of the non-loop edges from the low bits of `word`, in edge
    /// order; self-loops are skipped.
    pub fn from_proper_word(g: &Multigraph, word: u64) -> Self {
        let mut bits = vec![0; g.edge_count()];
        let mut i = 0;
        for (e, slot) in bits.iter_mut().enumerate() {
            if !g.is_self_loop(e) {
                *slot = ((word >> i) & 1) as u8;
                i += 1;
            }
        }
        Orientation { bits }
    }

    pub fn proper_word(&self, g: &Multigraph) -> u64 {
        let mut word = 0u64;
        let mut i = 0;
        for (e, &b) in self.bits.iter().enumerate() {
            if !g.is_self_loop(e) {
                word |= u64::from(b) << i;
                i += 1;
            }
        }
        word
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bit(&self, e: usize) -> u8 {
        self.bits[e]
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn head(&self, g: &Multigraph, e: usize) -> usize {
        g.edge(e).head(self.bits[e])
    }

    pub fn tail(&self, g: &Multigraph, e: usize) -> usize {
        g.edge(e).tail(self.bits[e])
    }

    /// Reverses a non-loop edge. Self-loops are left alone.
    pub fn reverse(&mut self, g: &Multigraph, e: usize) {
        if !g.is_self_loop(e) {
            self.bits[e] ^= 1;
        }
    }

    /// Out-degree of every vertex; a self-loop contributes one.
    pub fn out_degrees(&self, g: &Multigraph) -> Vec<usize> {
        let mut out = vec![0; g.vertex_count()];
        for (e, edge) in g.edges().iter().enumerate() {
            out[edge.tail(self.bits[e])] += 1;
        }
        out
    }

    pub fn in_degrees(&self, g: &Multigraph) -> Vec<usize> {
        let mut inn = vec![0; g.vertex_count()];
        for (e, edge) in g.edges().iter().enumerate() {
            inn[edge.head(self.bits[e])] += 1;
        }
        inn
    }

    pub fn is_sink(&self, g: &Multigraph, v: usize) -> bool {
        g.degree(v) > 0
            && !g.has_self_loop(v)
            && g.incident(v).iter().all(|&e| self.head(g, e) == v)
    }

    pub fn is_source(&self, g: &Multigraph, v: usize) -> bool {
        g.degree(v) > 0
            && !g.has_self_loop(v)
            && g.incident(v).iter().all(|&e| self.tail(g, e) == v)
    }

    pub fn sinks(&self, g: &Multigraph) -> Vec<usize> {
        (0..g.vertex_count()).filter(|&v| self.is_sink(g, v)).collect()
    }

    pub fn sources(&self, g: &Multigraph) -> Vec<usize> {
        (0..g.vertex_count())
            .filter(|&v| self.is_source(g, v))
            .collect()
    }

    pub fn is_sink_free(&self, g: &Multigraph) -> bool {
        (0..g.vertex_count()).all(|v| !self.is_sink(g, v))
    }

    /// Reverses every non-loop edge.
    pub fn reversed(&self, g: &Multigraph) -> Self {
        let mut out = self.clone();
        for e in 0..g.edge_count() {
            out.reverse(g, e);
        }
        out
    }
}

pub fn sinks(g: &Multigraph, o: &Orientation) -> Vec<usize> {
    o.sinks(g)
}

pub fn sources(g: &Multigraph, o: &Orientation) -> Vec<usize> {
    o.sources(g)
}

/// Named graph families.
///
/// * `Cycle(n)`: edge `i` joins `i` and `(i + 1) mod n`; `Cycle(1)` is a
///   vertex with a self-loop and `Cycle(2)` is a pair of parallel edges.
/// * `Lollipop(n)`: path `0 - 1 - ... - (n-1)` with a self-loop at `n-1`;
///   vertex `0` is the leaf.
/// * `Complete(n)`: all pairs `i < j` in lexicographic order, `n >= 3`.
/// * `Theta(k)`: two vertices joined by `k >= 2` parallel edges.
/// * `Random { n, m, seed }`: `m` uniformly drawn vertex pairs, redrawn until
///   the graph lies in class S.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphKind {
    Cycle(usize),
    Lollipop(usize),
    Complete(usize),
    Theta(usize),
    Random { n: usize, m: usize, seed: u64 },
}

const RANDOM_GRAPH_ATTEMPTS: usize = 10_000;

impl GraphKind {
    pub fn build(self) -> Result<Multigraph> {
        match self {
            GraphKind::Cycle(n) => {
                require(n >= 1, "cycle needs n >= 1")?;
                Multigraph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
            }
            GraphKind::Lollipop(n) => {
                require(n >= 1, "lollipop needs n >= 1")?;
                Multigraph::new(
                    n,
                    (0..n - 1).map(|i| (i, i + 1)).chain([(n - 1, n - 1)]),
                )
            }
            GraphKind::Complete(n) => {
                require(n >= 3, "complete graph needs n >= 3 to admit a sink-free orientation")?;
                Multigraph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
            }
            GraphKind::Theta(k) => {
                require(k >= 2, "theta graph needs k >= 2 parallel edges")?;
                Multigraph::new(2, std::iter::repeat_n((0, 1), k))
            }
            GraphKind::Random { n, m, seed } => random_class_s(n, m, seed),
        }
    }
}

fn require(cond: bool, message: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::GenerationFailed(message.into()))
    }
}

fn random_class_s(n: usize, m: usize, seed: u64) -> Result<Multigraph> {
    require(n >= 1, "random graph needs n >= 1")?;
    require(m >= n, "class S needs at least as many edges as vertices")?;
    require(n > 1 || m == 1, "a single vertex carries at most one self-loop")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_GRAPH_ATTEMPTS {
        let mut has_loop = vec![false; n];
        let mut pairs = Vec::with_capacity(m);
        while pairs.len() < m {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a == b {
                if has_loop[a] {
                    continue;
                }
                has_loop[a] = true;
            }
            pairs.push((a.min(b), a.max(b)));
        }
        let g = Multigraph::new(n, pairs)?;
        if g.classify().in_class_s {
            return Ok(g);
        }
    }
    Err(Error::GenerationFailed(format!(
        "no class-S graph with n = {n}, m = {m} after {RANDOM_GRAPH_ATTEMPTS} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_small_graphs() {
        let one = Multigraph::new(1, [(0, 0)]).unwrap();
        assert_eq!(one.edge_count(), 1);
        assert_eq!(one.degree(0), 1);
        assert_eq!(one.deg0(0), 0);
        assert!(one.classify().in_class_s);

        let tri = Multigraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(tri, GraphKind::Cycle(3).build().unwrap());
        assert_eq!(tri.incident(0), &[0, 2]);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert_eq!(
            Multigraph::new(2, [(0, 0), (0, 0)]),
            Err(Error::DuplicateSelfLoop { vertex: 0 })
        );
        assert_eq!(
            Multigraph::new(2, [(0, 2)]),
            Err(Error::IndexOutOfRange {
                index: 2,
                vertex_count: 2
            })
        );
    }

    #[test]
    fn classify_examples() {
        let k2 = Multigraph::new(2, [(0, 1)]).unwrap();
        let r = k2.classify();
        assert!(!r.in_class_s);
        assert_eq!(r.tree_components, vec![vec![0, 1]]);

        assert!(GraphKind::Cycle(3).build().unwrap().classify().in_class_s);

        let with_isolated = Multigraph::new(4, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let r = with_isolated.classify();
        assert!(!r.in_class_s);
        assert_eq!(r.tree_components, vec![vec![3]]);

        // a path with a loop in the middle is not a tree
        let g = Multigraph::new(3, [(0, 1), (1, 2), (1, 1)]).unwrap();
        assert!(g.classify().in_class_s);
    }

    #[test]
    fn sinks_on_triangle() {
        let g = GraphKind::Cycle(3).build().unwrap();
        // all bits 0: edge i points to i, so every vertex has out-degree 1
        let rot = Orientation::zeros(&g);
        assert!(rot.sinks(&g).is_empty());
        assert!(rot.is_sink_free(&g));
        // edge 0 (0,1) into 0 and edge 2 (2,0) into 0
        let o = Orientation::from_bits(&g, vec![0, 0, 1]).unwrap();
        assert_eq!(o.sinks(&g), vec![0]);
        assert_eq!(o.sources(&g), vec![2]);

        let c1 = GraphKind::Cycle(1).build().unwrap();
        assert!(Orientation::zeros(&c1).sinks(&c1).is_empty());
    }

    #[test]
    fn self_loop_bit_is_fixed() {
        let g = GraphKind::Lollipop(2).build().unwrap();
        assert!(Orientation::from_bits(&g, vec![1, 1]).is_err());
        assert!(Orientation::from_bits(&g, vec![1, 0]).is_ok());
        let mut o = Orientation::zeros(&g);
        o.reverse(&g, 1);
        assert_eq!(o.bit(1), 0);
    }

    #[test]
    fn generators() {
        let c1 = GraphKind::Cycle(1).build().unwrap();
        assert_eq!(c1.edges(), &[Edge { a: 0, b: 0 }]);
        let l3 = GraphKind::Lollipop(3).build().unwrap();
        let pairs: Vec<_> = l3.edges().iter().map(|e| (e.a, e.b)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2), (2, 2)]);
        let t3 = GraphKind::Theta(3).build().unwrap();
        assert_eq!((t3.vertex_count(), t3.edge_count()), (2, 3));
        assert!(t3.edges().iter().all(|e| (e.a, e.b) == (0, 1)));
        assert_eq!(GraphKind::Complete(5).build().unwrap().edge_count(), 10);
        assert!(GraphKind::Complete(2).build().is_err());
        assert!(GraphKind::Theta(1).build().is_err());
        assert!(matches!(
            GraphKind::Random { n: 5, m: 3, seed: 1 }.build(),
            Err(Error::GenerationFailed(_))
        ));
        for seed in 0..20 {
            let g = GraphKind::Random { n: 6, m: 8, seed }.build().unwrap();
            assert!(g.classify().in_class_s);
            assert_eq!(g.edge_count(), 8);
        }
    }

    #[test]
    fn edge_subgraph_maps() {
        let g = Multigraph::new(4, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 3)]).unwrap();
        let sub = g.edge_subgraph(&[3, 4]).unwrap();
        assert_eq!(sub.vertex_map, vec![2, 3]);
        assert_eq!(sub.edge_map, vec![3, 4]);
        assert!(sub.graph.classify().in_class_s);
        sub.validate(&g).unwrap();
        assert!(g.edge_subgraph(&[0, 0]).is_err());
        assert!(g.edge_subgraph(&[7]).is_err());
    }

    #[test]
    fn proper_word_round_trip() {
        let g = GraphKind::Lollipop(4).build().unwrap();
        for w in 0..8u64 {
            let o = Orientation::from_proper_word(&g, w);
            assert_eq!(o.proper_word(&g), w);
            assert_eq!(o.bit(3), 0);
        }
    }
}
