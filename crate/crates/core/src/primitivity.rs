//! Primeness of AF diagrams through pairwise common descendants, and essential paths.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

use crate::chain::{is_mi_chain, MiChain};
use crate::diagram::{MatrixUnit, SummandGraph, TafPresentation};
use crate::envelope::{EnvelopeDiagram, NodeRef};
use crate::error::{Result, TafError};

/// Square boolean matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl BoolMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, bits: vec![false; n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.bits[r * self.n + c] = v;
    }

    pub fn row(&self, r: usize) -> &[bool] {
        &self.bits[r * self.n..(r + 1) * self.n]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zeros(self.n);
        for r in 0..self.n {
            for k in (0..self.n).filter(|&k| self.get(r, k)) {
                for c in 0..self.n {
                    if other.get(k, c) {
                        out.set(r, c, true);
                    }
                }
            }
        }
        out
    }

    /// Whether rows `s` and `t` share a true column.
    pub fn rows_meet(&self, s: usize, t: usize) -> bool {
        self.row(s).iter().zip(self.row(t)).any(|(&a, &b)| a && b)
    }
}

/// Finite multigraph of node types of a stationary diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeGraph {
    pub labels: Vec<String>,
    pub edges: BTreeMap<(usize, usize), usize>,
}

impl TypeGraph {
    pub fn new(labels: Vec<String>, edges: BTreeMap<(usize, usize), usize>) -> Self {
        Self { labels, edges }
    }

    /// The per-type graph of a stationary presentation; `None` when it is per level.
    pub fn from_summand_graph(g: &SummandGraph) -> Option<Self> {
        if g.nodes.iter().any(|n| n.level.is_some()) {
            return None;
        }
        let labels = g.nodes.iter().map(|n| format!("s{}", n.summand)).collect();
        let edges = g.edges.iter().map(|e| ((e.from, e.to), e.multiplicity)).collect();
        Some(Self { labels, edges })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn multiplicity(&self, s: usize, t: usize) -> usize {
        self.edges.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().sum()
    }

    pub fn successors(&self, s: usize) -> Vec<usize> {
        self.edges.range((s, 0)..(s + 1, 0)).map(|(&(_, t), _)| t).collect()
    }

    pub fn adjacency(&self) -> BoolMatrix {
        let mut m = BoolMatrix::zeros(self.len());
        for &(s, t) in self.edges.keys() {
            m.set(s, t, true);
        }
        m
    }
}

/// `R^1, ..., R^{preperiod + period - 1}`, after which the powers cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescendantMatrices {
    pub powers: Vec<BoolMatrix>,
    pub preperiod: usize,
    pub period: usize,
}

impl DescendantMatrices {
    /// Largest exponent stored; every `R^d` equals one of `R^1..=R^window`.
    pub fn window(&self) -> usize {
        self.powers.len()
    }

    /// `R^d` for any `d >= 1`.
    pub fn power(&self, d: usize) -> &BoolMatrix {
        assert!(d >= 1);
        let d = if d <= self.window() { d } else { self.preperiod + (d - self.preperiod) % self.period };
        &self.powers[d - 1]
    }
}

pub fn descendant_matrices(graph: &TypeGraph) -> DescendantMatrices {
    let r = graph.adjacency();
    let mut seen: HashMap<BoolMatrix, usize> = HashMap::new();
    let mut powers = Vec::new();
    let mut current = r.clone();
    let mut d = 1;
    loop {
        if let Some(&e) = seen.get(&current) {
            return DescendantMatrices { powers, preperiod: e, period: d - e };
        }
        seen.insert(current.clone(), d);
        let next = current.mul(&r);
        powers.push(current);
        current = next;
        d += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimenessStatus {
    Primitive,
    NotPrime,
    InconclusiveAtHorizon,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimenessVerdict<N> {
    pub status: PrimenessStatus,
    /// Whether the verdict holds for the whole direct system, not just the computed part.
    pub exact: bool,
    /// Essential path prefix, one node per level.
    pub witness: Option<Vec<N>>,
    /// Two nodes without a common descendant in the analyzed range.
    pub counterexample: Option<(N, N)>,
    /// `(preperiod, period)` of the reachability powers, for type graphs.
    pub window: Option<(usize, usize)>,
}

impl<N> PrimenessVerdict<N> {
    fn new(status: PrimenessStatus, exact: bool) -> Self {
        Self { status, exact, witness: None, counterexample: None, window: None }
    }

    pub fn is_primitive(&self) -> bool {
        self.status == PrimenessStatus::Primitive
    }

    pub fn map<M>(self, f: impl Fn(N) -> M) -> PrimenessVerdict<M> {
        PrimenessVerdict {
            status: self.status,
            exact: self.exact,
            witness: self.witness.map(|w| w.into_iter().map(&f).collect()),
            counterexample: self.counterexample.map(|(a, b)| (f(a), f(b))),
            window: self.window,
        }
    }
}

/// Exact primeness test on a stationary type graph. Witness paths list types per level.
pub fn is_prime_pairwise(graph: &TypeGraph) -> PrimenessVerdict<usize> {
    let mats = descendant_matrices(graph);
    let window = Some((mats.preperiod, mats.period));
    if graph.is_empty() {
        return PrimenessVerdict { window, ..PrimenessVerdict::new(PrimenessStatus::NotPrime, true) };
    }
    for s in 0..graph.len() {
        for t in s + 1..graph.len() {
            if !(1..=mats.window()).any(|d| mats.power(d).rows_meet(s, t)) {
                return PrimenessVerdict {
                    counterexample: Some((s, t)),
                    window,
                    ..PrimenessVerdict::new(PrimenessStatus::NotPrime, true)
                };
            }
        }
    }
    let unrolled = UnrolledTypes { graph, depth: 2 * graph.len() * (mats.window() + 1) + 1 };
    let witness = find_essential_path(&unrolled, 1).ok().map(|path| path.nodes.into_iter().map(|n| n.index).collect());
    PrimenessVerdict { witness, window, ..PrimenessVerdict::new(PrimenessStatus::Primitive, true) }
}

/// A finite leveled diagram.
pub trait Layered {
    type Node: Copy + Eq + Ord + Hash + Debug;
    fn depth(&self) -> usize;
    fn layer(&self, level: usize) -> Vec<Self::Node>;
    fn successors(&self, node: Self::Node) -> Vec<Self::Node>;
    fn level_of(&self, node: Self::Node) -> usize;
    /// Whether nothing lies above the top level.
    fn is_terminal(&self) -> bool;
}

/// The kept subdiagram of an envelope.
impl Layered for EnvelopeDiagram {
    type Node = NodeRef;

    fn depth(&self) -> usize {
        EnvelopeDiagram::depth(self)
    }

    fn layer(&self, level: usize) -> Vec<NodeRef> {
        self.kept_nodes(level).into_iter().map(|index| NodeRef { level, index }).collect()
    }

    fn successors(&self, node: NodeRef) -> Vec<NodeRef> {
        self.kept_successors(node).into_iter().map(|index| NodeRef { level: node.level + 1, index }).collect()
    }

    fn level_of(&self, node: NodeRef) -> usize {
        node.level
    }

    fn is_terminal(&self) -> bool {
        EnvelopeDiagram::is_terminal(self)
    }
}

/// A type graph repeated over `depth` levels; `index` is the type.
#[derive(Debug, Clone, Copy)]
pub struct UnrolledTypes<'a> {
    pub graph: &'a TypeGraph,
    pub depth: usize,
}

impl Layered for UnrolledTypes<'_> {
    type Node = NodeRef;

    fn depth(&self) -> usize {
        self.depth
    }

    fn layer(&self, level: usize) -> Vec<NodeRef> {
        (0..self.graph.len()).map(|index| NodeRef { level, index }).collect()
    }

    fn successors(&self, node: NodeRef) -> Vec<NodeRef> {
        if node.level >= self.depth {
            return Vec::new();
        }
        self.graph.successors(node.index).into_iter().map(|index| NodeRef { level: node.level + 1, index }).collect()
    }

    fn level_of(&self, node: NodeRef) -> usize {
        node.level
    }

    fn is_terminal(&self) -> bool {
        false
    }
}

/// Descendant sets of `start`, one per level from its own up to `until`.
fn descendants_by_level<L: Layered>(d: &L, start: L::Node, until: usize) -> Vec<BTreeSet<L::Node>> {
    let mut out = vec![BTreeSet::from([start])];
    for _ in d.level_of(start)..until {
        let next: BTreeSet<_> = out.last().unwrap().iter().flat_map(|&n| d.successors(n)).collect();
        if next.is_empty() {
            break;
        }
        out.push(next);
    }
    out
}

/// Pairwise common-descendant test on a finite diagram within `horizon` levels.
///
/// Levels whose window is cut by the truncation are not analyzed unless the
/// diagram is terminal.
pub fn is_prime_bounded<L: Layered>(d: &L, horizon: usize) -> Result<PrimenessVerdict<L::Node>> {
    if horizon < 1 {
        return Err(TafError::InvalidHorizon(horizon));
    }
    let terminal = d.is_terminal();
    let depth = d.depth();
    let analyzed = if terminal { depth } else { depth.saturating_sub(horizon) };
    if (1..=depth).all(|l| d.layer(l).is_empty()) {
        return Ok(PrimenessVerdict::new(PrimenessStatus::NotPrime, terminal));
    }
    if analyzed == 0 {
        return Ok(PrimenessVerdict::new(PrimenessStatus::InconclusiveAtHorizon, false));
    }
    for level in 1..=analyzed {
        let until = if terminal { depth } else { level + horizon };
        let nodes = d.layer(level);
        let desc: Vec<_> = nodes.iter().map(|&n| descendants_by_level(d, n, until)).collect();
        for a in 0..nodes.len() {
            for b in a + 1..nodes.len() {
                let meet = desc[a].iter().zip(&desc[b]).any(|(x, y)| !x.is_disjoint(y));
                if !meet {
                    let status =
                        if terminal { PrimenessStatus::NotPrime } else { PrimenessStatus::InconclusiveAtHorizon };
                    return Ok(PrimenessVerdict {
                        counterexample: Some((nodes[a], nodes[b])),
                        ..PrimenessVerdict::new(status, terminal)
                    });
                }
            }
        }
    }
    let mut verdict = PrimenessVerdict::new(PrimenessStatus::Primitive, terminal);
    verdict.witness = find_essential_path(d, 1).ok().map(|p| p.nodes);
    Ok(verdict)
}

/// A path with one node per consecutive level, and the levels it is certified for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EssentialPath<N> {
    pub nodes: Vec<N>,
    /// Every node at a level `<= analyzed_through` reaches the path.
    pub analyzed_through: usize,
}

/// Breadth-first search from `from` to the first node of `targets`, returning the connecting path.
fn path_to<L: Layered>(d: &L, from: L::Node, targets: &HashSet<L::Node>) -> Option<Vec<L::Node>> {
    let mut parent: HashMap<L::Node, L::Node> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = HashSet::from([from]);
    while let Some(n) = queue.pop_front() {
        if targets.contains(&n) {
            let mut path = vec![n];
            let mut cur = n;
            while let Some(&p) = parent.get(&cur) {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for s in d.successors(n) {
            if seen.insert(s) {
                parent.insert(s, n);
                queue.push_back(s);
            }
        }
    }
    None
}

fn reachable<L: Layered>(d: &L, from: L::Node) -> HashSet<L::Node> {
    let mut seen = HashSet::from([from]);
    let mut stack = vec![from];
    while let Some(n) = stack.pop() {
        for s in d.successors(n) {
            if seen.insert(s) {
                stack.push(s);
            }
        }
    }
    seen
}

/// Round-robin absorption: extend the path through a common descendant of its
/// last node and each node not yet reaching it, level by level.
///
/// Absorption stops at the first level containing a node that cannot be joined
/// within the diagram; on a terminal diagram that is a proof of non-primeness.
/// Fails unless at least `min_levels` levels get certified.
pub fn find_essential_path<L: Layered>(d: &L, min_levels: usize) -> Result<EssentialPath<L::Node>> {
    let Some(first_level) = (1..=d.depth()).find(|&l| !d.layer(l).is_empty()) else {
        return Err(TafError::NotPrimitive("no nodes".into()));
    };
    let mut path = vec![d.layer(first_level)[0]];
    let mut on_path: HashSet<L::Node> = path.iter().copied().collect();
    let mut analyzed_through = first_level - 1;
    'levels: for level in first_level..=d.depth() {
        for q in d.layer(level) {
            if reachable(d, q).iter().any(|n| on_path.contains(n)) {
                continue;
            }
            let last = *path.last().unwrap();
            let from_q = reachable(d, q);
            match path_to(d, last, &from_q) {
                Some(ext) => {
                    for n in ext.into_iter().skip(1) {
                        on_path.insert(n);
                        path.push(n);
                    }
                }
                None if d.is_terminal() => {
                    return Err(TafError::NotPrimitive(format!("{last:?} and {q:?} have no common descendant")));
                }
                None => break 'levels,
            }
        }
        analyzed_through = level;
    }
    if analyzed_through < min_levels.max(first_level) {
        return Err(TafError::PathTooLong { requested: min_levels, available: analyzed_through });
    }
    // continue the path to the top so it is as long as the diagram allows
    loop {
        let last = *path.last().unwrap();
        match d.successors(last).first() {
            Some(&n) => path.push(n),
            None => break,
        }
    }
    Ok(EssentialPath { nodes: path, analyzed_through })
}

/// Checks consecutiveness and that every node at levels `<= through` reaches the path.
pub fn verify_essential_path<L: Layered>(d: &L, path: &[L::Node], through: usize) -> bool {
    if path.is_empty() {
        return false;
    }
    for w in path.windows(2) {
        if d.level_of(w[1]) != d.level_of(w[0]) + 1 || !d.successors(w[0]).contains(&w[1]) {
            return false;
        }
    }
    let on_path: HashSet<_> = path.iter().copied().collect();
    (1..=through.min(d.depth())).flat_map(|l| d.layer(l)).all(|n| reachable(d, n).iter().any(|x| on_path.contains(x)))
}

/// Primeness of an envelope: exact on a detected stationary tail or a terminal
/// diagram, horizon-bounded otherwise.
pub fn analyze_envelope(env: &EnvelopeDiagram) -> Result<PrimenessVerdict<NodeRef>> {
    if let Some(tail) = env.stationary_tail() {
        let tail_nodes: HashSet<NodeRef> = (tail.from_level..=tail.to_level).flat_map(|l| env.layer(l)).collect();
        let early_reach_tail = (1..tail.from_level)
            .flat_map(|l| env.layer(l))
            .all(|n| reachable(env, n).iter().any(|x| tail_nodes.contains(x)));
        if early_reach_tail {
            let v = is_prime_pairwise(&tail.graph);
            let from = tail.from_level;
            let mut mapped = PrimenessVerdict {
                status: v.status,
                exact: true,
                witness: None,
                counterexample: v.counterexample.map(|(s, t)| (tail.node_of_type(from, s), tail.node_of_type(from, t))),
                window: v.window,
            };
            if mapped.is_primitive() {
                mapped.witness = find_essential_path(env, 1).ok().map(|p| p.nodes);
            }
            return Ok(mapped);
        }
    }
    is_prime_bounded(env, env.horizon())
}

/// Top-right corner units of the interval nodes along an envelope path.
pub fn characteristic_matrix_units(path: &[NodeRef], env: &EnvelopeDiagram, p: &TafPresentation) -> Result<MiChain> {
    let Some(first) = path.first() else {
        return Err(TafError::ChainConsistency("empty path".into()));
    };
    let units: Vec<MatrixUnit> = path
        .iter()
        .map(|&r| {
            let q = env.node(r).projection;
            MatrixUnit::new(q.level, q.summand, q.a, q.b)
        })
        .collect();
    let chain = MiChain { start_level: first.level, units };
    if let Some(v) = is_mi_chain(p, &chain).violation {
        return Err(TafError::ChainConsistency(v.to_string()));
    }
    Ok(chain)
}
