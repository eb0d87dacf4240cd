//! Finite stages of the nest representation attached to an essential path.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::diagram::{MatrixUnit, TafPresentation};
use crate::envelope::{compress_to, EnvelopeDiagram, NodeRef};
use crate::error::{Result, TafError};
use crate::ideal::IdealTable;
use crate::linear::{SparseMatrix, UnitCombination};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubordinateRule {
    /// Start at position 1 and follow the first connecting arm.
    #[default]
    Leftmost,
    /// Start at the last position and follow the last connecting arm.
    Rightmost,
}

/// Diagonal positions `p_i` along consecutive path nodes, each carried to the next
/// by an envelope arm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateChain {
    pub nodes: Vec<NodeRef>,
    /// Relative position inside each node.
    pub positions: Vec<usize>,
    /// Envelope arm index (at the lower level) used for each step.
    pub arms: Vec<usize>,
}

impl StateChain {
    pub fn start_level(&self) -> usize {
        self.nodes[0].level
    }

    pub fn top_level(&self) -> usize {
        self.nodes.last().map_or(0, |n| n.level)
    }

    pub fn at(&self, level: usize) -> Option<(NodeRef, usize)> {
        let i = level.checked_sub(self.start_level())?;
        Some((*self.nodes.get(i)?, self.positions[i]))
    }
}

pub fn build_state_chain(env: &EnvelopeDiagram, path: &[NodeRef], rule: SubordinateRule) -> Result<StateChain> {
    let Some(&first) = path.first() else {
        return Err(TafError::ChainConsistency("empty path".into()));
    };
    let mut positions = vec![match rule {
        SubordinateRule::Leftmost => 1,
        SubordinateRule::Rightmost => env.node(first).projection.size(),
    }];
    let mut arms = Vec::with_capacity(path.len().saturating_sub(1));
    for w in path.windows(2) {
        let connecting: Vec<usize> = env
            .arms(w[0].level)
            .iter()
            .enumerate()
            .filter(|(_, a)| a.source == w[0].index && a.target == w[1].index)
            .map(|(i, _)| i)
            .collect();
        let chosen = match rule {
            SubordinateRule::Leftmost => connecting.first(),
            SubordinateRule::Rightmost => connecting.last(),
        };
        let &idx = chosen.ok_or(TafError::NoConnectingArm(w[0].level))?;
        let p = *positions.last().unwrap();
        positions.push(env.arms(w[0].level)[idx].injection[p - 1]);
        arms.push(idx);
    }
    Ok(StateChain { nodes: path.to_vec(), positions, arms })
}

/// `tau_d` on requested units: push to level `d`, compress to the path node.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteNestStage<T> {
    pub depth: usize,
    pub node: NodeRef,
    pub dim: usize,
    /// Position of `p_d` inside the node.
    pub position: usize,
    pub operators: Vec<(MatrixUnit, SparseMatrix<T>)>,
}

impl<T: Scalar> FiniteNestStage<T> {
    /// `omega(u)`: the `(p_d, p_d)` entry.
    pub fn omega(&self, idx: usize) -> T {
        self.operators[idx].1.get(self.position, self.position)
    }

    /// `tau_d(u) g` as nonzero (row, value) pairs of the `p_d` column.
    pub fn column(&self, idx: usize) -> Vec<(usize, T)> {
        let m = &self.operators[idx].1;
        (1..=self.dim).map(|r| (r, m.get(r, self.position))).filter(|(_, v)| !v.is_zero()).collect()
    }

    pub fn matrices(&self) -> impl Iterator<Item = &SparseMatrix<T>> {
        self.operators.iter().map(|(_, m)| m)
    }
}

fn stage_block<T: Scalar>(
    p: &TafPresentation,
    env: &EnvelopeDiagram,
    node: NodeRef,
    u: &MatrixUnit,
) -> Result<SparseMatrix<T>> {
    let images = p.push_to_depth(u, node.level)?;
    let combo = UnitCombination::new(images.into_iter().map(|v| (v, T::one())).collect());
    Ok(compress_to(&env.node(node).projection, &combo))
}

pub fn finite_gns_stage<T: Scalar>(
    p: &TafPresentation,
    j: &IdealTable,
    env: &EnvelopeDiagram,
    chain: &StateChain,
    d: usize,
    units: &[MatrixUnit],
) -> Result<FiniteNestStage<T>> {
    j.check_presentation(p)?;
    if env.fingerprint() != p.fingerprint() {
        return Err(TafError::MismatchedPresentation);
    }
    let (node, position) = chain.at(d).ok_or(TafError::PathTooLong { requested: d, available: chain.top_level() })?;
    if !env.node(node).is_kept() {
        return Err(TafError::NodeNotKept(d));
    }
    let mut operators = Vec::with_capacity(units.len());
    for u in units {
        if u.level > d {
            return Err(TafError::LevelOutOfRange { level: u.level, depth: d });
        }
        operators.push((*u, stage_block(p, env, node, u)?));
    }
    Ok(FiniteNestStage { depth: d, node, dim: env.node(node).projection.size(), position, operators })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "depth")]
pub enum KernelStatus {
    /// In `J` and zero at every stage checked, through the given depth.
    Vanishes(usize),
    /// Not in `J`; nonzero at this stage.
    NonzeroAt(usize),
    /// Not in `J`, but zero at every stage checked.
    Inconclusive,
    /// In `J` yet nonzero at this stage.
    Violation(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelEntry {
    pub unit: MatrixUnit,
    pub in_ideal: bool,
    pub status: KernelStatus,
}

/// Faithfulness on the quotient: `tau_d(u) = 0` for every stage iff `u` lies in `J`.
pub fn kernel_check(
    p: &TafPresentation,
    j: &IdealTable,
    env: &EnvelopeDiagram,
    chain: &StateChain,
    units: &[MatrixUnit],
    max_depth: usize,
) -> Result<Vec<KernelEntry>> {
    let top = max_depth.min(chain.top_level()).min(j.depth());
    let mut out = Vec::with_capacity(units.len());
    for u in units {
        let in_ideal = j.contains_unit(u);
        let mut status = if in_ideal { KernelStatus::Vanishes(top) } else { KernelStatus::Inconclusive };
        for d in u.level.max(chain.start_level())..=top {
            let (node, _) = chain.at(d).expect("level within chain");
            let nonzero = !stage_block::<i64>(p, env, node, u)?.is_zero();
            if nonzero {
                status = if in_ideal { KernelStatus::Violation(d) } else { KernelStatus::NonzeroAt(d) };
                break;
            }
        }
        out.push(KernelEntry { unit: *u, in_ideal, status });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestReport {
    /// Under the whole triangular algebra of the node the invariant coordinate
    /// subspaces are the initial segments.
    pub full_stage_nest: bool,
    /// The invariant coordinate subspaces of the supplied operators form a chain.
    pub image_invariant_subspace_chain: bool,
    /// Number of invariant coordinate subspaces, when they form a chain.
    pub chain_length: Option<usize>,
}

/// Whether the coordinate subspaces of `C^dim` invariant under all `matrices`
/// are totally ordered, and how many there are in that case.
///
/// Invariant coordinate sets are the down-sets of the preorder generated by
/// `c -> r` for every nonzero entry `(r, c)`; they form a chain iff it is total.
pub fn invariant_coordinate_chain<'a, T: Scalar>(
    dim: usize,
    matrices: impl IntoIterator<Item = &'a SparseMatrix<T>>,
) -> Option<usize> {
    let mut reach = vec![vec![false; dim]; dim];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for m in matrices {
        for &(r, c) in &m.support() {
            reach[c - 1][r - 1] = true;
        }
    }
    for k in 0..dim {
        let via = reach[k].clone();
        for row in reach.iter_mut().filter(|row| row[k]) {
            for (x, &v) in row.iter_mut().zip(&via) {
                *x |= v;
            }
        }
    }
    let total = (0..dim).all(|x| (0..dim).all(|y| reach[x][y] || reach[y][x]));
    if !total {
        return None;
    }
    let mut classes: Vec<usize> = (0..dim).map(|x| (0..dim).filter(|&y| reach[x][y]).count()).collect();
    classes.sort_unstable();
    classes.dedup();
    Some(classes.len() + 1)
}

pub fn check_nest<T: Scalar>(stage: &FiniteNestStage<T>) -> NestReport {
    let n = stage.dim;
    let full: Vec<SparseMatrix<T>> = (1..=n)
        .flat_map(|r| (r..=n).map(move |c| (r, c)))
        .map(|(r, c)| {
            let mut m = SparseMatrix::zeros(n);
            m.add(r, c, T::one());
            m
        })
        .collect();
    let full_stage_nest = invariant_coordinate_chain(n, &full) == Some(n + 1);
    let chain_length = invariant_coordinate_chain(n, stage.matrices());
    NestReport { full_stage_nest, image_invariant_subspace_chain: chain_length.is_some(), chain_length }
}

/// A matrix unit of the full matrix algebra of an envelope node, in relative coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct EnvelopeUnit {
    pub node: NodeRef,
    pub row: usize,
    pub col: usize,
}

/// Image of an envelope unit in `target`, through all envelope arm paths.
pub fn push_envelope_unit(env: &EnvelopeDiagram, unit: &EnvelopeUnit, target: NodeRef) -> SparseMatrix<i64> {
    let mut current: BTreeMap<usize, SparseMatrix<i64>> = BTreeMap::new();
    let mut start = SparseMatrix::zeros(env.node(unit.node).projection.size());
    start.add(unit.row, unit.col, 1);
    current.insert(unit.node.index, start);
    for level in unit.node.level..target.level {
        let mut next: BTreeMap<usize, SparseMatrix<i64>> = BTreeMap::new();
        for (&idx, m) in &current {
            for arm in env.out_arms(NodeRef { level, index: idx }) {
                let size = env.nodes(level + 1)[arm.target].projection.size();
                let slot = next.entry(arm.target).or_insert_with(|| SparseMatrix::zeros(size));
                for (&(r, c), v) in m.entries() {
                    slot.add(arm.injection[r - 1], arm.injection[c - 1], *v);
                }
            }
        }
        current = next;
    }
    current.remove(&target.index).unwrap_or_else(|| SparseMatrix::zeros(env.node(target).projection.size()))
}

/// Requires `omega(f^* x e) = value` for the element `x` being matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub e: EnvelopeUnit,
    pub f: EnvelopeUnit,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DensityOutcome {
    Found {
        combination: Vec<(MatrixUnit, i64)>,
        level: usize,
    },
    /// Nothing matched through `deepest_level`; a deeper search may succeed.
    Failure {
        deepest_level: usize,
    },
}

/// `omega_d(f^* x e)` for `x` given as a block on the path node at `d`.
fn coefficient(x: &SparseMatrix<i64>, e: &SparseMatrix<i64>, f: &SparseMatrix<i64>, p: usize) -> i64 {
    // (f^T x e)_{p,p} = sum_{s,t} f[s,p] x[s,t] e[t,p]
    x.entries().map(|(&(s, t), v)| f.get(s, p) * v * e.get(t, p)).sum()
}

struct Compiled {
    e: SparseMatrix<i64>,
    f: SparseMatrix<i64>,
    value: i64,
}

fn compile(env: &EnvelopeDiagram, node: NodeRef, constraints: &[Constraint]) -> Vec<Compiled> {
    constraints
        .iter()
        .map(|c| Compiled {
            e: push_envelope_unit(env, &c.e, node),
            f: push_envelope_unit(env, &c.f, node),
            value: c.value,
        })
        .collect()
}

const MAX_FREE_ENTRIES: usize = 16;

/// Searches for an element of `A` meeting the constraints: single units of levels
/// up to `d` first, then 0/1 combinations of level-`d` units, for `d` up to `search_depth`.
pub fn match_coefficients(
    p: &TafPresentation,
    env: &EnvelopeDiagram,
    chain: &StateChain,
    constraints: &[Constraint],
    search_depth: usize,
) -> Result<DensityOutcome> {
    let lowest = constraints.iter().flat_map(|c| [c.e.node.level, c.f.node.level]).max().unwrap_or(1);
    let top = search_depth.min(chain.top_level()).min(env.depth());
    let mut deepest = 0;
    for d in lowest.max(chain.start_level())..=top {
        deepest = d;
        let (node, pos) = chain.at(d).expect("level within chain");
        let compiled = compile(env, node, constraints);
        let satisfied = |x: &SparseMatrix<i64>| compiled.iter().all(|c| coefficient(x, &c.e, &c.f, pos) == c.value);
        for level in 1..=d {
            for u in p.units_at(level) {
                if satisfied(&stage_block::<i64>(p, env, node, &u)?) {
                    return Ok(DensityOutcome::Found { combination: vec![(u, 1)], level: d });
                }
            }
        }
        // combination of level-d units inside the node: entries are free upper-triangular positions
        let q = env.node(node).projection;
        let mut free: Vec<(usize, usize)> = compiled
            .iter()
            .flat_map(|c| {
                let rows: Vec<usize> = (1..=q.size()).filter(|&s| c.f.get(s, pos) != 0).collect();
                let cols: Vec<usize> = (1..=q.size()).filter(|&t| c.e.get(t, pos) != 0).collect();
                rows.into_iter().flat_map(move |s| cols.clone().into_iter().map(move |t| (s, t)))
            })
            .filter(|&(s, t)| s <= t)
            .collect();
        free.sort_unstable();
        free.dedup();
        if free.len() > MAX_FREE_ENTRIES {
            continue;
        }
        for mask in 0u32..(1 << free.len()) {
            let mut x = SparseMatrix::zeros(q.size());
            for (bit, &(s, t)) in free.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    x.add(s, t, 1);
                }
            }
            if satisfied(&x) {
                let combination = x
                    .entries()
                    .map(|(&(s, t), v)| (MatrixUnit::new(d, q.summand, s + q.a - 1, t + q.a - 1), *v))
                    .collect();
                return Ok(DensityOutcome::Found { combination, level: d });
            }
        }
    }
    Ok(DensityOutcome::Failure { deepest_level: deepest })
}

/// Finds `a_hat` in `A` with `omega(f_k^* a_hat e_k) = omega(f_k^* a e_k)` for each pair.
pub fn density_witness(
    p: &TafPresentation,
    env: &EnvelopeDiagram,
    chain: &StateChain,
    a: &EnvelopeUnit,
    pairs: &[(EnvelopeUnit, EnvelopeUnit)],
    search_depth: usize,
) -> Result<DensityOutcome> {
    if a.row > a.col {
        return Err(TafError::InvalidUnit(MatrixUnit::new(a.node.level, a.node.index, a.row, a.col)));
    }
    let lowest = pairs
        .iter()
        .flat_map(|(e, f)| [e.node.level, f.node.level])
        .chain([a.node.level])
        .max()
        .unwrap_or(a.node.level)
        .max(chain.start_level());
    let top = search_depth.min(chain.top_level()).min(env.depth());
    if lowest > top {
        return Ok(DensityOutcome::Failure { deepest_level: top });
    }
    // omega(f^* a e) is stable along the chain; evaluate it at the lowest common stage
    let (node, pos) = chain.at(lowest).expect("level within chain");
    let a_block = push_envelope_unit(env, a, node);
    let constraints: Vec<Constraint> = pairs
        .iter()
        .map(|&(e, f)| {
            let eb = push_envelope_unit(env, &e, node);
            let fb = push_envelope_unit(env, &f, node);
            Constraint { e, f, value: coefficient(&a_block, &eb, &fb, pos) }
        })
        .collect();
    match_coefficients(p, env, chain, &constraints, search_depth)
}
