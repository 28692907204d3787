//! The sink-popping process as an absorbing Markov chain on orientations.
//!
//! A state is the word of direction bits of the non-loop edges. With a
//! memoryless choice rule the chosen sink is a function of the state, and
//! popping it moves to each of the `2^deg0(v)` rewrites of `v`'s edges with
//! equal probability. Sink-free states absorb.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::linalg::{self, SparseMatrix};
use crate::error::{Error, Result};
use crate::graph::{Multigraph, Orientation};
use crate::popper::ChoiceRule;

/// Largest number of non-loop edges the chain accepts.
pub const MAX_PROPER_EDGES: usize = 20;
/// Up to this many non-loop edges every quantity is computed in exact
/// rational arithmetic.
pub const EXACT_PROPER_EDGES: usize = 10;
/// Residual bound for the floating-point path.
pub const FLOAT_TOLERANCE: f64 = 1e-9;
const FLOAT_MAX_SWEEPS: usize = 200_000;

/// Memoryless choice rule: pop the current sink that comes first in a fixed
/// vertex priority order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainRule {
    priority: Vec<usize>,
}

impl ChainRule {
    pub fn min_vertex_id(n: usize) -> Self {
        ChainRule {
            priority: (0..n).collect(),
        }
    }

    pub fn max_vertex_id(n: usize) -> Self {
        ChainRule {
            priority: (0..n).rev().collect(),
        }
    }

    /// `order` must be a permutation of `0..n`.
    pub fn priority(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &v in &order {
            if v >= order.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidArgument(format!(
                    "priority order {order:?} is not a permutation"
                )));
            }
        }
        Ok(ChainRule { priority: order })
    }

    /// Maps a sampler rule onto the chain. Only rules that depend on the
    /// current orientation alone have a chain counterpart.
    pub fn from_choice(rule: ChoiceRule, n: usize) -> Result<Self> {
        match rule {
            ChoiceRule::MinVertexId => Ok(Self::min_vertex_id(n)),
            other => Err(Error::UnsupportedRule(other.name().into())),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.priority
    }
}

/// Initial orientation for conditional quantities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Init {
    Uniform,
    Fixed(Orientation),
}

/// A chain quantity: exact when the chain is small enough, always with a
/// float value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainValue {
    #[serde(serialize_with = "serialize_rational")]
    pub exact: Option<BigRational>,
    pub value: f64,
}

fn serialize_rational<S: serde::Serializer>(
    q: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_some(&q.to_string()),
        None => s.serialize_none(),
    }
}

impl ChainValue {
    pub fn from_exact(q: BigRational) -> Self {
        ChainValue {
            value: linalg::to_f64(&q),
            exact: Some(q),
        }
    }

    pub fn from_float(value: f64) -> Self {
        ChainValue { exact: None, value }
    }

    pub fn integer(n: i64) -> Self {
        Self::from_exact(BigRational::from_integer(n.into()))
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exact equality when both sides are exact, otherwise agreement within
    /// `tolerance`.
    pub fn matches(&self, other: &ChainValue, tolerance: f64) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => (self.value - other.value).abs() <= tolerance,
        }
    }
}

/// Distribution of the number of pops up to a horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauDistribution {
    /// `probabilities[k] = P(tau = k)`.
    pub probabilities: Vec<ChainValue>,
    /// `P(tau > horizon)`.
    pub tail: ChainValue,
}

/// Bit masks for sink tests on state words.
#[derive(Debug, Clone)]
pub(crate) struct SinkMasks {
    /// Non-loop edges incident to each vertex.
    pub incident: Vec<u64>,
    /// Direction bits that make each vertex the head of all those edges.
    pub toward: Vec<u64>,
    /// Vertices that can be sinks (positive degree, no self-loop).
    pub candidates: Vec<bool>,
}

impl SinkMasks {
    pub fn new(g: &Multigraph) -> Self {
        let n = g.vertex_count();
        let mut incident = vec![0u64; n];
        let mut toward = vec![0u64; n];
        let mut bit = 0;
        for edge in g.edges() {
            if edge.is_loop() {
                continue;
            }
            incident[edge.a] |= 1 << bit;
            incident[edge.b] |= 1 << bit;
            toward[edge.b] |= 1 << bit;
            bit += 1;
        }
        let candidates = (0..n)
            .map(|v| g.degree(v) > 0 && !g.has_self_loop(v))
            .collect();
        SinkMasks {
            incident,
            toward,
            candidates,
        }
    }

    pub fn is_sink(&self, v: usize, word: u64) -> bool {
        self.candidates[v] && word & self.incident[v] == self.toward[v]
    }

    pub fn is_sink_free(&self, word: u64) -> bool {
        (0..self.incident.len()).all(|v| !self.is_sink(v, word))
    }
}

pub(crate) fn check_size(g: &Multigraph) -> Result<usize> {
    let m0 = g.proper_edge_count();
    if m0 > MAX_PROPER_EDGES {
        return Err(Error::TooLarge(format!(
            "{m0} non-loop edges exceeds the limit of {MAX_PROPER_EDGES}"
        )));
    }
    Ok(m0)
}

/// The absorbing chain of sink popping on a class-S graph under a priority
/// rule.
#[derive(Debug, Clone)]
pub struct ExactChain {
    graph: Multigraph,
    rule: ChainRule,
    proper_edges: usize,
    masks: SinkMasks,
    /// Sink popped from each state, `None` for absorbing states.
    popped: Vec<Option<usize>>,
    /// Row of each transient state in the linear systems.
    row_of: Vec<usize>,
    transient: Vec<u64>,
    absorbing: Vec<u64>,
    /// `2^D (I - Q)` over transient states, `D` the largest popped `deg0`.
    system: SparseMatrix,
    scale_exp: u32,
}

impl ExactChain {
    pub fn build(g: &Multigraph, rule: &ChainRule) -> Result<Self> {
        let m0 = check_size(g)?;
        g.require_class_s()?;
        if rule.order().len() != g.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "rule orders {} vertices, graph has {}",
                rule.order().len(),
                g.vertex_count()
            )));
        }
        let masks = SinkMasks::new(g);
        let states = 1u64 << m0;
        let mut popped = Vec::with_capacity(states as usize);
        let mut row_of = vec![usize::MAX; states as usize];
        let mut transient = Vec::new();
        let mut absorbing = Vec::new();
        for word in 0..states {
            let sink = rule
                .order()
                .iter()
                .copied()
                .find(|&v| masks.is_sink(v, word));
            if sink.is_some() {
                row_of[word as usize] = transient.len();
                transient.push(word);
            } else {
                absorbing.push(word);
            }
            popped.push(sink);
        }

        let scale_exp = transient
            .iter()
            .map(|&w| masks.incident[popped[w as usize].unwrap()].count_ones())
            .max()
            .unwrap_or(0);
        let mut system = SparseMatrix::new(transient.len());
        for (row, &word) in transient.iter().enumerate() {
            let v = popped[word as usize].unwrap();
            let mask = masks.incident[v];
            let weight = 1i64 << (scale_exp - mask.count_ones());
            system.add(row, row, 1i64 << scale_exp);
            for next in subsets(mask).map(|sub| (word & !mask) | sub) {
                let col = row_of[next as usize];
                if col != usize::MAX {
                    system.add(row, col, -weight);
                }
            }
        }

        Ok(ExactChain {
            graph: g.clone(),
            rule: rule.clone(),
            proper_edges: m0,
            masks,
            popped,
            row_of,
            transient,
            absorbing,
            system,
            scale_exp,
        })
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn rule(&self) -> &ChainRule {
        &self.rule
    }

    pub fn state_count(&self) -> usize {
        self.popped.len()
    }

    pub fn transient_count(&self) -> usize {
        self.transient.len()
    }

    pub fn is_exact(&self) -> bool {
        self.proper_edges <= EXACT_PROPER_EDGES
    }

    /// The sink-free orientations, in state order.
    pub fn sink_free_states(&self) -> Vec<Orientation> {
        self.absorbing
            .iter()
            .map(|&w| Orientation::from_proper_word(&self.graph, w))
            .collect()
    }

    /// The sink popped from state `word`, if any.
    pub fn popped_at(&self, word: u64) -> Option<usize> {
        self.popped[word as usize]
    }

    fn successors(&self, word: u64) -> impl Iterator<Item = u64> + '_ {
        let mask = self.popped[word as usize].map_or(0, |v| self.masks.incident[v]);
        let fixed = word & !mask;
        subsets(mask).map(move |sub| fixed | sub)
    }

    fn deg_of_pop(&self, word: u64) -> u32 {
        self.popped[word as usize].map_or(0, |v| self.masks.incident[v].count_ones())
    }

    /// Solves `(I - Q) x = c` for every right-hand side, where `c` is given
    /// per transient state. Returns the solution indexed by state word, zero
    /// on absorbing states.
    fn solve_forward(&self, rhs: &[Vec<i64>]) -> Result<Vec<Vec<ChainValue>>> {
        let scale = 1i64 << self.scale_exp;
        let scaled: Vec<Vec<i64>> = rhs
            .iter()
            .map(|c| c.iter().map(|&x| x * scale).collect())
            .collect();
        let per_row = self.solve_rows(&self.system, &scaled, scale as f64)?;
        Ok(per_row
            .into_iter()
            .map(|x| self.expand(x))
            .collect())
    }

    fn solve_rows(
        &self,
        a: &SparseMatrix,
        rhs: &[Vec<i64>],
        scale: f64,
    ) -> Result<Vec<Vec<ChainValue>>> {
        if self.is_exact() {
            Ok(linalg::solve_exact(a, rhs)?
                .into_iter()
                .map(|x| x.into_iter().map(ChainValue::from_exact).collect())
                .collect())
        } else {
            rhs.iter()
                .map(|b| {
                    let bf: Vec<f64> = b.iter().map(|&v| v as f64).collect();
                    let (x, _) =
                        linalg::solve_float(a, &bf, scale, FLOAT_TOLERANCE, FLOAT_MAX_SWEEPS)?;
                    Ok(x.into_iter().map(ChainValue::from_float).collect())
                })
                .collect()
        }
    }

    fn expand(&self, per_row: Vec<ChainValue>) -> Vec<ChainValue> {
        let zero = self.zero();
        let mut out = vec![zero; self.state_count()];
        for (row, value) in per_row.into_iter().enumerate() {
            out[self.transient[row] as usize] = value;
        }
        out
    }

    fn zero(&self) -> ChainValue {
        if self.is_exact() {
            ChainValue::integer(0)
        } else {
            ChainValue::from_float(0.0)
        }
    }

    fn average(&self, values: &[ChainValue]) -> ChainValue {
        if self.is_exact() {
            let sum: BigRational = values.iter().map(|v| v.exact.clone().unwrap()).sum();
            ChainValue::from_exact(sum / BigRational::from_integer(values.len().into()))
        } else {
            ChainValue::from_float(values.iter().map(|v| v.value).sum::<f64>() / values.len() as f64)
        }
    }

    fn pick(&self, per_state: Vec<ChainValue>, init: &Init) -> Result<ChainValue> {
        match init {
            Init::Uniform => Ok(self.average(&per_state)),
            Init::Fixed(o) => {
                if o.len() != self.graph.edge_count() {
                    return Err(Error::InvalidOrientation(format!(
                        "expected {} entries, got {}",
                        self.graph.edge_count(),
                        o.len()
                    )));
                }
                Ok(per_state[o.proper_word(&self.graph) as usize].clone())
            }
        }
    }

    /// `E(tau | initial state)` for every state word.
    pub fn expected_tau_by_state(&self) -> Result<Vec<ChainValue>> {
        let ones = vec![1i64; self.transient_count()];
        Ok(self.solve_forward(&[ones])?.remove(0))
    }

    /// `E(Q(v) | initial state)` for every state word.
    pub fn expected_q_by_state(&self, v: usize) -> Result<Vec<ChainValue>> {
        Ok(self.expected_q_all_by_state(&[v])?.remove(0))
    }

    /// `E(Q(v) | initial state)` for several vertices with one factorisation.
    pub fn expected_q_all_by_state(&self, vertices: &[usize]) -> Result<Vec<Vec<ChainValue>>> {
        for &v in vertices {
            if v >= self.graph.vertex_count() {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    vertex_count: self.graph.vertex_count(),
                });
            }
        }
        let rhs: Vec<Vec<i64>> = vertices
            .iter()
            .map(|&v| {
                self.transient
                    .iter()
                    .map(|&w| i64::from(self.popped[w as usize] == Some(v)))
                    .collect()
            })
            .collect();
        self.solve_forward(&rhs)
    }

    pub fn expected_tau(&self, init: &Init) -> Result<ChainValue> {
        self.pick(self.expected_tau_by_state()?, init)
    }

    pub fn expected_q(&self, v: usize, init: &Init) -> Result<ChainValue> {
        self.pick(self.expected_q_by_state(v)?, init)
    }

    /// Probability of ending in each sink-free orientation from a uniform
    /// initial orientation.
    pub fn absorption_distribution(&self) -> Result<Vec<(Orientation, ChainValue)>> {
        // expected visits y to each transient state: (I - Q)^T y = 1
        let scale = 1i64 << self.scale_exp;
        let visits = self
            .solve_rows(
                &self.system.transpose(),
                &[vec![scale; self.transient_count()]],
                scale as f64,
            )?
            .remove(0);
        let states = self.state_count() as i64;
        let mut slot = vec![usize::MAX; self.state_count()];
        for (i, &w) in self.absorbing.iter().enumerate() {
            slot[w as usize] = i;
        }
        if self.is_exact() {
            let mut mass = vec![BigRational::one(); self.absorbing.len()];
            for (row, &w) in self.transient.iter().enumerate() {
                let y = visits[row].exact.as_ref().unwrap();
                let share = y / BigRational::from_integer(BigInt::one() << self.deg_of_pop(w));
                for next in self.successors(w) {
                    if let Some(&i) = slot.get(next as usize).filter(|&&i| i != usize::MAX) {
                        mass[i] += &share;
                    }
                }
            }
            let norm = BigRational::from_integer(states.into());
            Ok(self
                .absorbing
                .iter()
                .zip(mass)
                .map(|(&w, m)| {
                    (
                        Orientation::from_proper_word(&self.graph, w),
                        ChainValue::from_exact(m / &norm),
                    )
                })
                .collect())
        } else {
            let mut mass = vec![1.0; self.absorbing.len()];
            for (row, &w) in self.transient.iter().enumerate() {
                let share = visits[row].value / f64::from(1u32 << self.deg_of_pop(w));
                for next in self.successors(w) {
                    let i = slot[next as usize];
                    if i != usize::MAX {
                        mass[i] += share;
                    }
                }
            }
            Ok(self
                .absorbing
                .iter()
                .zip(mass)
                .map(|(&w, m)| {
                    (
                        Orientation::from_proper_word(&self.graph, w),
                        ChainValue::from_float(m / states as f64),
                    )
                })
                .collect())
        }
    }

    /// `P(tau = k)` for `k <= horizon` from a uniform initial orientation,
    /// by pushing the state distribution through the transition operator.
    pub fn tau_distribution(&self, horizon: usize) -> TauDistribution {
        if self.is_exact() {
            self.tau_distribution_exact(horizon)
        } else {
            self.tau_distribution_float(horizon)
        }
    }

    /// Extends the horizon until the tail mass drops below `tail` (or
    /// `max_horizon` is reached).
    pub fn tau_distribution_until(&self, tail: f64, max_horizon: usize) -> TauDistribution {
        let mut horizon = 64;
        loop {
            let d = self.tau_distribution(horizon);
            if d.tail.value < tail || horizon >= max_horizon {
                return d;
            }
            horizon = (horizon * 2).min(max_horizon);
        }
    }

    fn tau_distribution_exact(&self, horizon: usize) -> TauDistribution {
        // masses are numerators over a common power of two
        let d = self.scale_exp as usize;
        let mut exponent = self.proper_edges;
        let mut mass: Vec<BigInt> = vec![BigInt::one(); self.transient_count()];
        let dyadic = |num: BigInt, exp: usize| {
            ChainValue::from_exact(BigRational::new(num, BigInt::one() << exp))
        };
        let mut probabilities = vec![dyadic(BigInt::from(self.absorbing.len()), exponent)];
        for _ in 0..horizon {
            let mut next = vec![BigInt::zero(); self.transient_count()];
            let mut absorbed = BigInt::zero();
            for (row, &w) in self.transient.iter().enumerate() {
                if mass[row].is_zero() {
                    continue;
                }
                let share = &mass[row] << (d - self.deg_of_pop(w) as usize);
                for succ in self.successors(w) {
                    match self.row_of[succ as usize] {
                        usize::MAX => absorbed += &share,
                        col => next[col] += &share,
                    }
                }
            }
            exponent += d;
            probabilities.push(dyadic(absorbed, exponent));
            mass = next;
        }
        let tail: BigInt = mass.into_iter().sum();
        TauDistribution {
            probabilities,
            tail: dyadic(tail, exponent),
        }
    }

    fn tau_distribution_float(&self, horizon: usize) -> TauDistribution {
        let start = 1.0 / self.state_count() as f64;
        let mut mass = vec![start; self.transient_count()];
        let mut probabilities =
            vec![ChainValue::from_float(self.absorbing.len() as f64 * start)];
        for _ in 0..horizon {
            let mut next = vec![0.0; self.transient_count()];
            let mut absorbed = 0.0;
            for (row, &w) in self.transient.iter().enumerate() {
                let share = mass[row] / f64::from(1u32 << self.deg_of_pop(w));
                for succ in self.successors(w) {
                    match self.row_of[succ as usize] {
                        usize::MAX => absorbed += share,
                        col => next[col] += share,
                    }
                }
            }
            probabilities.push(ChainValue::from_float(absorbed));
            mass = next;
        }
        TauDistribution {
            probabilities,
            tail: ChainValue::from_float(mass.iter().sum()),
        }
    }
}

/// All submasks of `mask`, including `0` and `mask`.
fn subsets(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask {
            None
        } else {
            Some((cur.wrapping_sub(mask)) & mask)
        };
        Some(cur)
    })
}
