//! Binary labeling by minimum s-t cut.
//!
//! Items are internal nodes of a flow network. Each item `i` gets an arc from
//! the source with capacity `ind1(i)` and an arc to the sink with capacity
//! `ind2(i)`; every associated pair `(i, k)` gets an undirected edge of
//! capacity `assoc(i, k)`. The cost of a cut, the sum of the capacities it
//! severs, equals the partition cost of the labeling it induces, so a maximum
//! flow yields an optimal labeling. The source side is class 1.
//!
//! Real-valued weights are scaled and rounded to integers so the flow
//! computation is exact.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SCALE: i64 = 1_000_000;

/// Largest instance the exhaustive oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Individual preferences of one item: `source` for class 1, `sink` for class 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScorePair {
    pub source: f64,
    pub sink: f64,
}

impl ScorePair {
    pub fn new(source: f64, sink: f64) -> Self {
        Self { source, sink }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IndividualScores(pub Vec<ScorePair>);

impl IndividualScores {
    /// `(p, 1 - p)` pairs.
    pub fn from_probabilities(probs: &[f64]) -> Self {
        Self(probs.iter().map(|&p| ScorePair::new(p, 1.0 - p)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ScorePair> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[ScorePair] {
        &self.0
    }

    /// Multiplies every score by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self(
            self.0
                .iter()
                .map(|p| ScorePair::new(p.source * factor, p.sink * factor))
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for IndividualScores {
    type Output = ScorePair;

    fn index(&self, i: usize) -> &ScorePair {
        &self.0[i]
    }
}

impl FromIterator<ScorePair> for IndividualScores {
    fn from_iter<I: IntoIterator<Item = ScorePair>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Symmetric pairwise scores, stored once per unordered pair. Zero scores
/// are not stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AssociationScores {
    pairs: BTreeMap<(usize, usize), f64>,
}

impl AssociationScores {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `assoc(i, k) = weight`, replacing any previous value.
    pub fn insert(&mut self, i: usize, k: usize, weight: f64) -> Result<()> {
        if i == k {
            return Err(Error::Validation(format!("self-association on item {i}")));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::Validation(format!(
                "association ({i}, {k}) must be finite and nonnegative, got {weight}"
            )));
        }
        let key = (i.min(k), i.max(k));
        if weight == 0.0 {
            self.pairs.remove(&key);
        } else {
            self.pairs.insert(key, weight);
        }
        Ok(())
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.pairs
            .get(&(i.min(k), i.max(k)))
            .copied()
            .unwrap_or(0.0)
    }

    /// `(i, k, weight)` with `i < k`, in increasing key order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.pairs.iter().map(|(&(i, k), &w)| (i, k, w))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            pairs: self.pairs.iter().map(|(&k, &w)| (k, w * factor)).collect(),
        }
    }
}

fn membership(n: usize, source_side: &[usize]) -> Vec<bool> {
    let mut in_source = vec![false; n];
    for &i in source_side {
        in_source[i] = true;
    }
    in_source
}

/// Wrong-side individual penalties plus severed association penalties.
pub fn partition_cost(
    ind: &IndividualScores,
    assoc: &AssociationScores,
    source_side: &[usize],
) -> f64 {
    let in_source = membership(ind.len(), source_side);
    let individual: f64 = ind
        .iter()
        .zip(&in_source)
        .map(|(p, &s)| if s { p.sink } else { p.source })
        .sum();
    let association: f64 = assoc
        .iter()
        .filter(|&(i, k, _)| in_source[i] != in_source[k])
        .map(|(_, _, w)| w)
        .sum();
    individual + association
}

/// `round(weight * scale)`, ties to even.
pub fn scale_weight(weight: f64, scale: i64) -> i64 {
    (weight * scale as f64).round_ties_even() as i64
}

/// Source/sink network over `n` items. Node `n` is the source, `n + 1` the sink.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    n: usize,
    scale_factor: i64,
    source_caps: Vec<i64>,
    sink_caps: Vec<i64>,
    edges: Vec<(usize, usize, i64)>,
    individual: IndividualScores,
    association: AssociationScores,
}

impl FlowNetwork {
    pub fn build(
        ind: &IndividualScores,
        assoc: &AssociationScores,
        scale_factor: i64,
    ) -> Result<Self> {
        if scale_factor <= 0 {
            return Err(Error::Config(format!(
                "scale factor must be positive, got {scale_factor}"
            )));
        }
        let n = ind.len();
        for (i, p) in ind.iter().enumerate() {
            for w in [p.source, p.sink] {
                if !(w.is_finite() && w >= 0.0) {
                    return Err(Error::Validation(format!(
                        "individual score of item {i} must be finite and nonnegative, got {w}"
                    )));
                }
            }
        }
        let mut edges = Vec::with_capacity(assoc.len());
        for (i, k, w) in assoc.iter() {
            if k >= n {
                return Err(Error::Validation(format!(
                    "association ({i}, {k}) references an item outside 0..{n}"
                )));
            }
            let cap = scale_weight(w, scale_factor);
            if cap > 0 {
                edges.push((i, k, cap));
            }
        }
        Ok(Self {
            n,
            scale_factor,
            source_caps: ind
                .iter()
                .map(|p| scale_weight(p.source, scale_factor))
                .collect(),
            sink_caps: ind
                .iter()
                .map(|p| scale_weight(p.sink, scale_factor))
                .collect(),
            edges,
            individual: ind.clone(),
            association: assoc.clone(),
        })
    }

    pub fn num_items(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> usize {
        self.n
    }

    pub fn sink(&self) -> usize {
        self.n + 1
    }

    pub fn scale_factor(&self) -> i64 {
        self.scale_factor
    }

    /// Source arcs plus sink arcs.
    pub fn terminal_arc_count(&self) -> usize {
        self.source_caps.len() + self.sink_caps.len()
    }

    /// Undirected item-item edges; each is two opposite directed arcs.
    pub fn association_edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Directed arcs as `(u, v, capacity)`: source arcs, sink arcs, then both
    /// directions of every association edge.
    pub fn arcs(&self) -> Vec<(usize, usize, i64)> {
        let (s, t) = (self.source(), self.sink());
        let mut out = Vec::with_capacity(2 * self.n + 2 * self.edges.len());
        out.extend(self.source_caps.iter().enumerate().map(|(i, &c)| (s, i, c)));
        out.extend(self.sink_caps.iter().enumerate().map(|(i, &c)| (i, t, c)));
        for &(i, k, c) in &self.edges {
            out.push((i, k, c));
            out.push((k, i, c));
        }
        out
    }

    /// Plain-text arc list, one `u v capacity` line per directed arc, preceded
    /// by a comment line naming the terminals.
    pub fn dump_arcs(&self) -> String {
        let mut out = format!(
            "# nodes {} source {} sink {} scale {}\n",
            self.n + 2,
            self.source(),
            self.sink(),
            self.scale_factor
        );
        for (u, v, c) in self.arcs() {
            let _ = writeln!(out, "{u} {v} {c}");
        }
        out
    }

    /// Integer cut capacity of the partition with the given membership mask.
    pub fn scaled_cost(&self, in_source: &[bool]) -> i64 {
        let individual: i64 = (0..self.n)
            .map(|i| {
                if in_source[i] {
                    self.sink_caps[i]
                } else {
                    self.source_caps[i]
                }
            })
            .sum();
        let association: i64 = self
            .edges
            .iter()
            .filter(|&&(i, k, _)| in_source[i] != in_source[k])
            .map(|&(_, _, c)| c)
            .sum();
        individual + association
    }

    /// Real-valued partition cost from the unscaled scores.
    pub fn partition_cost(&self, source_side: &[usize]) -> f64 {
        partition_cost(&self.individual, &self.association, source_side)
    }

    pub fn min_cut(&self) -> CutResult {
        min_cut(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    /// Items labeled class 1, ascending.
    pub source_side: Vec<usize>,
    /// Partition cost of `source_side` on the unscaled scores.
    pub cost: f64,
    /// Maximum flow in scaled integer units; equals the scaled cut capacity.
    pub max_flow_value: i64,
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    cap: i64,
    rev: usize,
}

/// Dinic's algorithm on an adjacency-list residual graph.
struct Dinic {
    graph: Vec<Vec<Arc>>,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

impl Dinic {
    fn new(nodes: usize) -> Self {
        Self {
            graph: vec![Vec::new(); nodes],
            level: vec![-1; nodes],
            cursor: vec![0; nodes],
        }
    }

    /// Arc `u -> v` with capacity `forward` and its reverse with `backward`.
    fn add_pair(&mut self, u: usize, v: usize, forward: i64, backward: i64) {
        let ru = self.graph[v].len();
        let rv = self.graph[u].len();
        self.graph[u].push(Arc {
            to: v,
            cap: forward,
            rev: ru,
        });
        self.graph[v].push(Arc {
            to: u,
            cap: backward,
            rev: rv,
        });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for a in &self.graph[u] {
                if a.cap > 0 && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, limit: i64) -> i64 {
        if u == t {
            return limit;
        }
        while self.cursor[u] < self.graph[u].len() {
            let Arc { to, cap, rev } = self.graph[u][self.cursor[u]];
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0 {
                    let idx = self.cursor[u];
                    self.graph[u][idx].cap -= pushed;
                    self.graph[to][rev].cap += pushed;
                    return pushed;
                }
            }
            self.cursor[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.cursor.fill(0);
            loop {
                let pushed = self.dfs(s, t, i64::MAX);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }

    /// Nodes reachable from `s` through arcs with residual capacity.
    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.graph.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for a in &self.graph[u] {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    queue.push_back(a.to);
                }
            }
        }
        seen
    }
}

/// Exact minimum cut. The source side returned is the set of items reachable
/// from the source in the final residual graph, which is the unique minimum
/// cut with the smallest source side.
pub fn min_cut(net: &FlowNetwork) -> CutResult {
    let n = net.n;
    let (s, t) = (net.source(), net.sink());
    let mut dinic = Dinic::new(n + 2);
    for i in 0..n {
        dinic.add_pair(s, i, net.source_caps[i], 0);
        dinic.add_pair(i, t, net.sink_caps[i], 0);
    }
    for &(i, k, c) in &net.edges {
        dinic.add_pair(i, k, c, c);
    }
    let max_flow_value = dinic.max_flow(s, t);
    let seen = dinic.reachable(s);
    let source_side: Vec<usize> = (0..n).filter(|&i| seen[i]).collect();
    debug_assert_eq!(net.scaled_cost(&seen[..n]), max_flow_value);
    CutResult {
        cost: net.partition_cost(&source_side),
        source_side,
        max_flow_value,
    }
}

/// Exhaustive minimum over all `2^n` labelings, compared at the scaled
/// integer level. Ties go to the lexicographically smallest source side.
pub fn brute_force_min(
    ind: &IndividualScores,
    assoc: &AssociationScores,
    scale_factor: i64,
) -> Result<CutResult> {
    let n = ind.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::OracleTooLarge(n));
    }
    let net = FlowNetwork::build(ind, assoc, scale_factor)?;
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut mask = vec![false; n];
    for bits in 0u32..(1u32 << n) {
        for (i, m) in mask.iter_mut().enumerate() {
            *m = bits >> i & 1 == 1;
        }
        let cost = net.scaled_cost(&mask);
        let improves = match &best {
            None => true,
            Some((b, _)) if cost < *b => true,
            Some((b, side)) if cost == *b => {
                let candidate: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
                candidate < *side
            }
            _ => false,
        };
        if improves {
            best = Some((cost, (0..n).filter(|&i| mask[i]).collect()));
        }
    }
    let (max_flow_value, source_side) = best.expect("at least the empty labeling is enumerated");
    Ok(CutResult {
        cost: partition_cost(ind, assoc, &source_side),
        source_side,
        max_flow_value,
    })
}
