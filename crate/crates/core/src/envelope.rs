//! The C*-envelope of a quotient `A/J` as a derived Bratteli diagram.
//!
//! Nodes at level `i` are the `J`-free interval projections `S_i`; each is a full
//! matrix summand `B(Ran p)` of `B_i`. Arms of `pi_i` come from the maximal
//! embedding rule, and the kept subdiagram (nodes that are eventually mapped
//! into a maximal node) presents `B'`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::diagram::TafPresentation;
use crate::error::{Result, TafError};
use crate::ideal::{ClosedSet, IdealTable};
use crate::linear::{SparseMatrix, UnitCombination};
use crate::primitivity::TypeGraph;
use crate::scalar::Scalar;

/// Diagonal projection onto positions `a..=b` of one summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct IntervalProjection {
    pub level: usize,
    pub summand: usize,
    pub a: usize,
    pub b: usize,
}

impl IntervalProjection {
    pub fn size(&self) -> usize {
        self.b - self.a + 1
    }

    pub fn contains_position(&self, k: usize) -> bool {
        self.a <= k && k <= self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeptStatus {
    /// Reaches a maximal node within the computed depth.
    Kept,
    /// Never reaches a maximal node: definitive for terminal diagrams, decided
    /// at the horizon otherwise.
    Pruned,
    /// Too close to the truncation level for the horizon to decide.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnvelopeNode {
    pub projection: IntervalProjection,
    pub maximal: bool,
    pub kept: KeptStatus,
}

impl EnvelopeNode {
    pub fn is_kept(&self) -> bool {
        self.kept == KeptStatus::Kept
    }
}

/// A multiplicity-one embedding of a node into a node of the next level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnvelopeArm {
    /// Node index at the source level.
    pub source: usize,
    /// Node index at the next level.
    pub target: usize,
    /// Index of the presentation arm inducing this one.
    pub original_arm: usize,
    /// Relative positions: `injection[m - 1]` is the image of position `m`.
    pub injection: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeRef {
    pub level: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopeDiagram {
    fingerprint: u64,
    horizon: usize,
    terminal: bool,
    stationary_from: Option<usize>,
    levels: Vec<Vec<EnvelopeNode>>,
    arms: Vec<Vec<EnvelopeArm>>,
    out: Vec<Vec<Vec<usize>>>,
    lookup: Vec<HashMap<(usize, usize, usize), usize>>,
}

/// `J`-free intervals of one summand, given `J`'s closed set there.
fn free_intervals(set: &ClosedSet) -> impl Iterator<Item = (usize, usize)> + '_ {
    // [a,b] is J-free iff its corner (a,b) is outside J, i.e. b < t(a).
    (1..=set.size()).flat_map(move |a| (a..set.threshold(a).min(set.size() + 1)).map(move |b| (a, b)))
}

/// All `J`-free interval projections at level `i`, ordered by summand, `a`, `b`.
pub fn j_free_intervals(p: &TafPresentation, j: &IdealTable, i: usize) -> Result<Vec<IntervalProjection>> {
    j.check_presentation(p)?;
    if i == 0 || i > j.depth() {
        return Err(TafError::LevelOutOfRange { level: i, depth: j.depth() });
    }
    Ok(j.level(i)
        .iter()
        .enumerate()
        .flat_map(|(s, set)| free_intervals(set).map(move |(a, b)| IntervalProjection { level: i, summand: s, a, b }))
        .collect())
}

/// Flags the members not properly contained in another member of the same summand.
pub fn maximal_intervals(nodes: &[IntervalProjection]) -> Vec<bool> {
    let mut by_summand: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (idx, n) in nodes.iter().enumerate() {
        by_summand.entry((n.level, n.summand)).or_default().push(idx);
    }
    let mut flags = vec![false; nodes.len()];
    for members in by_summand.values() {
        let mut sorted = members.clone();
        sorted.sort_by_key(|&i| (nodes[i].a, std::cmp::Reverse(nodes[i].b)));
        // first of each run of equal a is the widest; maximal iff it beats all smaller a
        let mut reach = 0;
        let mut prev_a = None;
        for &i in &sorted {
            let n = nodes[i];
            if prev_a != Some(n.a) {
                flags[i] = n.b > reach;
                reach = reach.max(n.b);
                prev_a = Some(n.a);
            }
        }
    }
    flags
}

/// Arms of `pi_i` from the nodes of level `i` to those of level `i + 1`.
pub fn envelope_arms(p: &TafPresentation, j: &IdealTable, i: usize) -> Result<Vec<EnvelopeArm>> {
    if i + 1 > j.depth() {
        return Err(TafError::LevelOutOfRange { level: i + 1, depth: j.depth() });
    }
    let here = j_free_intervals(p, j, i)?;
    let next = j_free_intervals(p, j, i + 1)?;
    let lookup: HashMap<_, _> = here.iter().enumerate().map(|(idx, n)| ((n.summand, n.a, n.b), idx)).collect();
    Ok(arms_between(p, j, i, &lookup, &next))
}

fn arms_between(
    p: &TafPresentation,
    j: &IdealTable,
    i: usize,
    lookup: &HashMap<(usize, usize, usize), usize>,
    next: &[IntervalProjection],
) -> Vec<EnvelopeArm> {
    let mut targets_by_summand: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, n) in next.iter().enumerate() {
        targets_by_summand.entry(n.summand).or_default().push(idx);
    }
    let mut out = Vec::new();
    for (arm_idx, arm) in p.arms().iter().enumerate().filter(|(_, a)| a.level == i) {
        let Some(targets) = targets_by_summand.get(&arm.target) else { continue };
        let thresholds = &j.level(i)[arm.source];
        for &t in targets {
            let (c, d) = (next[t].a, next[t].b);
            // sources [a,b] with c <= iota(a) and iota(b) <= d
            let lo = arm.injection.partition_point(|&x| x < c) + 1;
            let hi = arm.injection.partition_point(|&x| x <= d);
            if lo > hi {
                continue;
            }
            let widest = |a: usize| hi.min(thresholds.threshold(a) - 1);
            for a in lo..=hi {
                let b = widest(a);
                if b < a || (a > lo && widest(a - 1) >= b) {
                    continue;
                }
                let source = lookup[&(arm.source, a, b)];
                let injection = (a..=b).map(|k| arm.apply(k) - c + 1).collect();
                out.push(EnvelopeArm { source, target: t, original_arm: arm_idx, injection });
            }
        }
    }
    out
}

/// Builds the envelope diagram through `depth` with kept flags decided within
/// `horizon` levels (exactly, when the diagram is terminal).
pub fn build_envelope(p: &TafPresentation, j: &IdealTable, depth: usize, horizon: usize) -> Result<EnvelopeDiagram> {
    if horizon < 1 {
        return Err(TafError::InvalidHorizon(horizon));
    }
    j.check_presentation(p)?;
    if depth == 0 || depth > j.depth() {
        return Err(TafError::LevelOutOfRange { level: depth, depth: j.depth() });
    }
    let terminal = p.stationary().is_none() && depth == p.depth();
    let mut projections = Vec::with_capacity(depth);
    let mut lookup = Vec::with_capacity(depth);
    for i in 1..=depth {
        let nodes = j_free_intervals(p, j, i)?;
        lookup.push(nodes.iter().enumerate().map(|(idx, n)| ((n.summand, n.a, n.b), idx)).collect::<HashMap<_, _>>());
        projections.push(nodes);
    }
    let mut arms = Vec::with_capacity(depth.saturating_sub(1));
    for i in 1..depth {
        arms.push(arms_between(p, j, i, &lookup[i - 1], &projections[i]));
    }
    let mut out: Vec<Vec<Vec<usize>>> = projections.iter().map(|l| vec![Vec::new(); l.len()]).collect();
    for (i, level_arms) in arms.iter().enumerate() {
        for (idx, arm) in level_arms.iter().enumerate() {
            out[i][arm.source].push(idx);
        }
    }
    let maximal: Vec<Vec<bool>> = projections.iter().map(|l| maximal_intervals(l)).collect();
    let mut reaches: Vec<Vec<bool>> = maximal.clone();
    for i in (1..depth).rev() {
        for n in 0..projections[i - 1].len() {
            if !reaches[i - 1][n] {
                reaches[i - 1][n] = out[i - 1][n].iter().any(|&a| reaches[i][arms[i - 1][a].target]);
            }
        }
    }
    let levels = projections
        .into_iter()
        .enumerate()
        .map(|(li, nodes)| {
            let level = li + 1;
            nodes
                .into_iter()
                .enumerate()
                .map(|(n, projection)| {
                    let kept = if reaches[li][n] {
                        KeptStatus::Kept
                    } else if terminal || depth - level >= horizon {
                        KeptStatus::Pruned
                    } else {
                        KeptStatus::Undetermined
                    };
                    EnvelopeNode { projection, maximal: maximal[li][n], kept }
                })
                .collect()
        })
        .collect();
    Ok(EnvelopeDiagram {
        fingerprint: p.fingerprint(),
        horizon,
        terminal,
        stationary_from: p.stationary().map(|t| t.from_level),
        levels,
        arms,
        out,
        lookup,
    })
}

/// A stretch of levels on which the kept subdiagram repeats one pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationaryTail {
    pub graph: TypeGraph,
    pub from_level: usize,
    pub to_level: usize,
    /// Kept node indices per level of the tail; position in the list is the type.
    pub types: Vec<Vec<usize>>,
}

impl StationaryTail {
    pub fn node_of_type(&self, level: usize, ty: usize) -> NodeRef {
        NodeRef { level, index: self.types[level - self.from_level][ty] }
    }
}

impl EnvelopeDiagram {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Whether the top level is the genuine end of the direct system.
    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn nodes(&self, level: usize) -> &[EnvelopeNode] {
        &self.levels[level - 1]
    }

    pub fn node(&self, r: NodeRef) -> &EnvelopeNode {
        &self.levels[r.level - 1][r.index]
    }

    /// Arms from `level` to `level + 1`.
    pub fn arms(&self, level: usize) -> &[EnvelopeArm] {
        &self.arms[level - 1]
    }

    pub fn out_arms(&self, r: NodeRef) -> impl Iterator<Item = &EnvelopeArm> {
        let arms = if r.level < self.depth() { &self.arms[r.level - 1][..] } else { &[][..] };
        let idx: &[usize] = if r.level < self.depth() { &self.out[r.level - 1][r.index] } else { &[] };
        idx.iter().map(move |&a| &arms[a])
    }

    pub fn find(&self, level: usize, summand: usize, a: usize, b: usize) -> Option<NodeRef> {
        self.lookup.get(level.wrapping_sub(1))?.get(&(summand, a, b)).map(|&index| NodeRef { level, index })
    }

    pub fn kept_nodes(&self, level: usize) -> Vec<usize> {
        self.levels[level - 1].iter().enumerate().filter(|(_, n)| n.is_kept()).map(|(i, _)| i).collect()
    }

    pub fn all_kept(&self) -> Vec<NodeRef> {
        (1..=self.depth())
            .flat_map(|level| self.kept_nodes(level).into_iter().map(move |index| NodeRef { level, index }))
            .collect()
    }

    /// Kept successors (deduplicated, ordered) of a kept node.
    pub fn kept_successors(&self, r: NodeRef) -> Vec<usize> {
        let mut s: Vec<usize> =
            self.out_arms(r).map(|a| a.target).filter(|&t| self.levels[r.level][t].is_kept()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Detects a repeating kept pattern on the settled levels of a stationary diagram.
    ///
    /// Settled levels are those with no undetermined node. The tail starts at the
    /// first level (not below the template's) from which every transition, up to a
    /// per-level relabelling of the kept nodes, induces one multigraph. At least
    /// [`MIN_TAIL_TRANSITIONS`] transitions are required.
    pub fn stationary_tail(&self) -> Option<StationaryTail> {
        let from = self.stationary_from?;
        let settled = (1..=self.depth())
            .take_while(|&l| self.levels[l - 1].iter().all(|n| n.kept != KeptStatus::Undetermined))
            .last()?;
        (from..=settled.saturating_sub(MIN_TAIL_TRANSITIONS)).find_map(|start| self.tail_between(start, settled))
    }

    fn tail_between(&self, from: usize, to: usize) -> Option<StationaryTail> {
        let kept: Vec<Vec<usize>> = (from..=to).map(|l| self.kept_nodes(l)).collect();
        let m = kept[0].len();
        if m == 0 || m > MAX_TAIL_TYPES || kept.iter().any(|k| k.len() != m) {
            return None;
        }
        let mats: Vec<Vec<Vec<usize>>> = (from..to)
            .map(|level| {
                let here: HashMap<usize, usize> = kept[level - from].iter().enumerate().map(|(r, &n)| (n, r)).collect();
                let next: HashMap<usize, usize> =
                    kept[level + 1 - from].iter().enumerate().map(|(r, &n)| (n, r)).collect();
                let mut mat = vec![vec![0; m]; m];
                for arm in &self.arms[level - 1] {
                    if let (Some(&s), Some(&t)) = (here.get(&arm.source), next.get(&arm.target)) {
                        mat[s][t] += 1;
                    }
                }
                mat
            })
            .collect();
        let identity: Vec<usize> = (0..m).collect();
        let mut perms = vec![identity.clone()];
        let mut first = identity;
        loop {
            let g: Vec<Vec<usize>> = (0..m).map(|s| (0..m).map(|t| mats[0][s][first[t]]).collect()).collect();
            perms.truncate(1);
            perms.push(first.clone());
            if extend_labelling(&mats, &g, &mut perms) {
                let types = perms
                    .iter()
                    .zip(&kept)
                    .map(|(perm, k)| perm.iter().map(|&pos| k[pos]).collect::<Vec<_>>())
                    .collect::<Vec<_>>();
                let labels = types[0]
                    .iter()
                    .map(|&n| {
                        let p = self.levels[from - 1][n].projection;
                        format!("s{}[{},{}]", p.summand, p.a, p.b)
                    })
                    .collect();
                let mut edges = BTreeMap::new();
                for (s, row) in g.iter().enumerate() {
                    for (t, &c) in row.iter().enumerate() {
                        if c > 0 {
                            edges.insert((s, t), c);
                        }
                    }
                }
                return Some(StationaryTail {
                    graph: TypeGraph::new(labels, edges),
                    from_level: from,
                    to_level: to,
                    types,
                });
            }
            if !next_permutation(&mut first) {
                return None;
            }
        }
    }
}

/// Fewest repeated transitions accepted as a stationary tail.
pub const MIN_TAIL_TRANSITIONS: usize = 2;
const MAX_TAIL_TYPES: usize = 7;

/// Extends `perms` (type -> kept position, one per level) so that every remaining
/// transition matrix, relabelled, equals `g`.
fn extend_labelling(mats: &[Vec<Vec<usize>>], g: &[Vec<usize>], perms: &mut Vec<Vec<usize>>) -> bool {
    let step = perms.len() - 1;
    if step == mats.len() {
        return true;
    }
    let m = g.len();
    let rows = perms[step].clone();
    let column = |pos: usize| -> Vec<usize> { rows.iter().map(|&r| mats[step][r][pos]).collect() };
    let want: Vec<Vec<usize>> = (0..m).map(|t| (0..m).map(|s| g[s][t]).collect()).collect();
    let have: Vec<Vec<usize>> = (0..m).map(column).collect();
    let mut assign = vec![usize::MAX; m];
    let mut used = vec![false; m];
    assign_columns(0, &want, &have, &mut assign, &mut used, &mut |assign| {
        perms.push(assign.to_vec());
        if extend_labelling(mats, g, perms) {
            return true;
        }
        perms.pop();
        false
    })
}

fn assign_columns(
    t: usize,
    want: &[Vec<usize>],
    have: &[Vec<usize>],
    assign: &mut [usize],
    used: &mut [bool],
    done: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if t == want.len() {
        return done(assign);
    }
    for pos in 0..have.len() {
        if !used[pos] && have[pos] == want[t] {
            used[pos] = true;
            assign[t] = pos;
            if assign_columns(t + 1, want, have, assign, used, done) {
                return true;
            }
            used[pos] = false;
        }
    }
    false
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("a larger element exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Per-node compression `p a p |_{Ran p}` of a unit combination at one level.
///
/// Returns one block per node of `S_i`, in node order.
pub fn envelope_compression<T: Scalar>(
    env: &EnvelopeDiagram,
    combo: &UnitCombination<T>,
) -> Result<Vec<SparseMatrix<T>>> {
    let Some(level) = combo.level()? else {
        return Ok(Vec::new());
    };
    if level == 0 || level > env.depth() {
        return Err(TafError::LevelOutOfRange { level, depth: env.depth() });
    }
    Ok(env.nodes(level).iter().map(|node| compress_to(&node.projection, combo)).collect())
}

pub(crate) fn compress_to<T: Scalar>(node: &IntervalProjection, combo: &UnitCombination<T>) -> SparseMatrix<T> {
    let mut block = SparseMatrix::zeros(node.size());
    for (u, c) in &combo.terms {
        if u.summand == node.summand && node.contains_position(u.row) && node.contains_position(u.col) {
            block.add(u.row - node.a + 1, u.col - node.a + 1, c.clone());
        }
    }
    block
}
