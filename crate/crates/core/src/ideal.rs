//! Depth-bounded matrix-unit tables for closed two-sided ideals.
//!
//! Inside one summand `T_n` a set of units closed under `(k,l) => (k',l')` for
//! `k' <= k`, `l' >= l` is determined by its row thresholds: row `k` contains
//! exactly the columns `l >= t(k)`, and `t` is nondecreasing with `k <= t(k) <= n+1`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diagram::{MatrixUnit, TafPresentation};
use crate::error::{Result, TafError};

/// A levelwise-closed set of units inside one summand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosedSet {
    size: usize,
    thresholds: Vec<usize>,
}

impl ClosedSet {
    pub fn empty(size: usize) -> Self {
        Self { size, thresholds: vec![size + 1; size] }
    }

    pub fn full(size: usize) -> Self {
        Self { size, thresholds: (1..=size).collect() }
    }

    /// Closure of the given `(row, col)` pairs.
    pub fn from_units(size: usize, units: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut set = Self::empty(size);
        for (k, l) in units {
            set.insert(k, l);
        }
        set
    }

    /// Builds a set from its row thresholds, normalizing each to `k..=n+1`.
    /// Returns `None` when the thresholds are not nondecreasing.
    pub fn from_thresholds(size: usize, thresholds: Vec<usize>) -> Option<Self> {
        if thresholds.len() != size {
            return None;
        }
        let thresholds: Vec<usize> =
            thresholds.into_iter().enumerate().map(|(i, t)| t.clamp(i + 1, size + 1)).collect();
        if thresholds.windows(2).any(|w| w[0] > w[1]) {
            return None;
        }
        Some(Self { size, thresholds })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Smallest column present in row `k` (or `n + 1` when the row is empty).
    pub fn threshold(&self, k: usize) -> usize {
        self.thresholds[k - 1]
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.thresholds
    }

    pub fn contains(&self, k: usize, l: usize) -> bool {
        k >= 1 && k <= l && l <= self.size && l >= self.thresholds[k - 1]
    }

    /// Adds `(k, l)` together with everything above and to its right.
    pub fn insert(&mut self, k: usize, l: usize) -> bool {
        debug_assert!(1 <= k && k <= l && l <= self.size);
        let mut changed = false;
        for t in &mut self.thresholds[..k] {
            if *t > l {
                *t = l;
                changed = true;
            }
        }
        changed
    }

    pub fn union_with(&mut self, other: &Self) -> bool {
        debug_assert_eq!(self.size, other.size);
        let mut changed = false;
        for (t, &o) in self.thresholds.iter_mut().zip(&other.thresholds) {
            if o < *t {
                *t = o;
                changed = true;
            }
        }
        changed
    }

    pub fn intersection(&self, other: &Self) -> Self {
        debug_assert_eq!(self.size, other.size);
        let thresholds = self.thresholds.iter().zip(&other.thresholds).map(|(&a, &b)| a.max(b)).collect();
        Self { size: self.size, thresholds }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.thresholds.iter().zip(&other.thresholds).all(|(&a, &b)| a >= b)
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.iter().all(|&t| t > self.size)
    }

    pub fn is_full(&self) -> bool {
        self.thresholds.iter().enumerate().all(|(i, &t)| t == i + 1)
    }

    pub fn len(&self) -> usize {
        self.thresholds.iter().map(|&t| self.size + 1 - t).sum()
    }

    /// Minimal generators: the units whose closure is the whole set.
    pub fn corners(&self) -> Vec<(usize, usize)> {
        (1..=self.size)
            .filter(|&k| {
                let t = self.thresholds[k - 1];
                t <= self.size && (k == self.size || self.thresholds[k] != t)
            })
            .map(|k| (k, self.thresholds[k - 1]))
            .collect()
    }

    pub fn units(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.size).flat_map(move |k| (self.thresholds[k - 1]..=self.size).map(move |l| (k, l)))
    }
}

/// Closed sets of one level, indexed by summand.
pub type LevelSets = Vec<ClosedSet>;

/// Smallest levelwise-closed set at `level` containing `units`.
pub fn levelwise_closure(p: &TafPresentation, level: usize, units: &[MatrixUnit]) -> Result<LevelSets> {
    p.check_level(level)?;
    let mut sets: LevelSets = p.level_sizes(level).iter().map(|&n| ClosedSet::empty(n)).collect();
    for u in units {
        if u.level != level {
            return Err(TafError::MixedLevels);
        }
        p.check_unit(u)?;
        sets[u.summand].insert(u.row, u.col);
    }
    Ok(sets)
}

/// Closure of the forward image of `sets` (at `level`) in level `level + 1`.
pub fn push_sets(p: &TafPresentation, level: usize, sets: &[ClosedSet]) -> LevelSets {
    let mut next: LevelSets = p.level_sizes(level + 1).iter().map(|&n| ClosedSet::empty(n)).collect();
    for (s, set) in sets.iter().enumerate() {
        let corners = set.corners();
        for &idx in p.outgoing(level, s) {
            let arm = p.arm(idx);
            for &(k, l) in &corners {
                next[arm.target].insert(arm.apply(k), arm.apply(l));
            }
        }
    }
    next
}

/// Units at `level` whose every image lies in `next` (the sets at `level + 1`).
pub fn pull_sets(p: &TafPresentation, level: usize, next: &[ClosedSet]) -> LevelSets {
    p.level_sizes(level)
        .iter()
        .enumerate()
        .map(|(s, &n)| {
            let arms = p.outgoing(level, s);
            let thresholds = (1..=n)
                .map(|k| {
                    let mut t = k;
                    for &idx in arms {
                        let arm = p.arm(idx);
                        let target = &next[arm.target];
                        let need = target.threshold(arm.apply(k));
                        // first l >= k with image column >= need
                        let rest = &arm.injection[k - 1..];
                        let off = rest.partition_point(|&c| c < need);
                        t = t.max(k + off);
                    }
                    t.min(n + 1)
                })
                .collect();
            ClosedSet { size: n, thresholds }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// Definitive.
    In,
    /// Not found at this depth; may become `In` at a larger depth.
    OutAtDepth { depth: usize },
}

/// An ideal `J` through depth `D`: the closed sets `J cap A_i` for `i <= D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IdealTable {
    fingerprint: u64,
    levels: Vec<LevelSets>,
    saturated: Vec<bool>,
}

/// Per-level export of a table: `(summand, [(row, col), ...])` lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelUnits {
    pub level: usize,
    pub summands: Vec<Vec<(usize, usize)>>,
}

impl IdealTable {
    pub fn zero(p: &TafPresentation, depth: usize) -> Result<Self> {
        p.check_level(depth)?;
        let levels = (1..=depth).map(|i| p.level_sizes(i).iter().map(|&n| ClosedSet::empty(n)).collect()).collect();
        Ok(Self { fingerprint: p.fingerprint(), levels, saturated: vec![true; depth] })
    }

    pub fn whole(p: &TafPresentation, depth: usize) -> Result<Self> {
        p.check_level(depth)?;
        let levels = (1..=depth).map(|i| p.level_sizes(i).iter().map(|&n| ClosedSet::full(n)).collect()).collect();
        Ok(Self { fingerprint: p.fingerprint(), levels, saturated: vec![true; depth] })
    }

    /// Builds a table from explicit per-level unit lists, checking both invariants.
    pub fn from_level_sets(p: &TafPresentation, sets: &[Vec<Vec<(usize, usize)>>]) -> Result<Self> {
        let depth = sets.len();
        p.check_level(depth)?;
        let mut levels = Vec::with_capacity(depth);
        for (i, level) in sets.iter().enumerate() {
            let sizes = p.level_sizes(i + 1);
            if level.len() != sizes.len() {
                return Err(TafError::InvalidTable(format!(
                    "level {} lists {} summands, presentation has {}",
                    i + 1,
                    level.len(),
                    sizes.len()
                )));
            }
            let mut closed = Vec::with_capacity(sizes.len());
            for (s, units) in level.iter().enumerate() {
                let n = sizes[s];
                let raw: BTreeSet<(usize, usize)> = units.iter().copied().collect();
                if let Some(&(k, l)) = raw.iter().find(|&&(k, l)| k == 0 || k > l || l > n) {
                    return Err(TafError::InvalidTable(format!(
                        "({k},{l}) is not a unit of summand {s} at level {}",
                        i + 1
                    )));
                }
                let set = ClosedSet::from_units(n, raw.iter().copied());
                if set.len() != raw.len() {
                    return Err(TafError::InvalidTable(format!("level {} summand {s} is not levelwise closed", i + 1)));
                }
                closed.push(set);
            }
            levels.push(closed);
        }
        let mut table = Self { fingerprint: p.fingerprint(), levels, saturated: vec![false; depth] };
        table.check_forward(p)?;
        for i in 1..=depth {
            table.saturated[i - 1] = i == depth
                || pull_sets(p, i, &table.levels[i]).iter().zip(&table.levels[i - 1]).all(|(a, b)| a.is_subset(b));
        }
        Ok(table)
    }

    fn check_forward(&self, p: &TafPresentation) -> Result<()> {
        for i in 1..self.depth() {
            let pushed = push_sets(p, i, &self.levels[i - 1]);
            if !pushed.iter().zip(&self.levels[i]).all(|(a, b)| a.is_subset(b)) {
                return Err(TafError::InvalidTable(format!("level {i} is not forward coherent")));
            }
        }
        Ok(())
    }

    /// Asserts closure (by construction), forward coherence and, when flagged,
    /// backward saturation.
    pub fn check_invariants(&self, p: &TafPresentation) -> Result<()> {
        self.check_presentation(p)?;
        self.check_forward(p)?;
        for i in 1..self.depth() {
            if self.saturated[i - 1] {
                let pulled = pull_sets(p, i, &self.levels[i]);
                if !pulled.iter().zip(&self.levels[i - 1]).all(|(a, b)| a.is_subset(b)) {
                    return Err(TafError::InvalidTable(format!("level {i} flagged saturated but is not")));
                }
            }
        }
        Ok(())
    }

    pub fn check_presentation(&self, p: &TafPresentation) -> Result<()> {
        if self.fingerprint != p.fingerprint() {
            return Err(TafError::MismatchedPresentation);
        }
        Ok(())
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, level: usize) -> &[ClosedSet] {
        &self.levels[level - 1]
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated.iter().all(|&s| s)
    }

    pub fn saturation_flags(&self) -> &[bool] {
        &self.saturated
    }

    pub fn contains_unit(&self, u: &MatrixUnit) -> bool {
        u.level >= 1
            && u.level <= self.depth()
            && self.levels[u.level - 1].get(u.summand).is_some_and(|s| s.contains(u.row, u.col))
    }

    pub fn membership(&self, u: &MatrixUnit) -> Membership {
        if self.contains_unit(u) {
            Membership::In
        } else {
            Membership::OutAtDepth { depth: self.depth() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().flatten().all(ClosedSet::is_empty)
    }

    /// The whole algebra at every level (the improper ideal).
    pub fn is_whole(&self) -> bool {
        self.levels.iter().flatten().all(ClosedSet::is_full)
    }

    pub fn unit_count(&self) -> usize {
        self.levels.iter().flatten().map(ClosedSet::len).sum()
    }

    pub fn units_at(&self, level: usize) -> Vec<MatrixUnit> {
        self.levels[level - 1]
            .iter()
            .enumerate()
            .flat_map(|(s, set)| set.units().map(move |(k, l)| MatrixUnit::new(level, s, k, l)))
            .collect()
    }

    /// The first `depth` levels.
    pub fn truncated(&self, depth: usize) -> Self {
        let depth = depth.min(self.depth());
        Self {
            fingerprint: self.fingerprint,
            levels: self.levels[..depth].to_vec(),
            saturated: self.saturated[..depth].to_vec(),
        }
    }

    pub fn export(&self) -> Vec<LevelUnits> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, sets)| LevelUnits { level: i + 1, summands: sets.iter().map(|s| s.units().collect()).collect() })
            .collect()
    }

    /// Applies the backward rule from the top level down until nothing changes.
    pub fn saturate(&mut self, p: &TafPresentation) {
        loop {
            let mut changed = false;
            for i in (1..self.depth()).rev() {
                let pulled = pull_sets(p, i, &self.levels[i]);
                for (set, extra) in self.levels[i - 1].iter_mut().zip(&pulled) {
                    changed |= set.union_with(extra);
                }
            }
            if !changed {
                break;
            }
        }
        self.saturated.iter_mut().for_each(|s| *s = true);
    }

    /// Restores forward coherence by pushing every level into the next.
    fn propagate(&mut self, p: &TafPresentation) {
        for i in 1..self.depth() {
            let pushed = push_sets(p, i, &self.levels[i - 1]);
            for (set, extra) in self.levels[i].iter_mut().zip(&pushed) {
                set.union_with(extra);
            }
        }
    }

    pub(crate) fn mark_saturated(&mut self) {
        self.saturated.iter_mut().for_each(|s| *s = true);
    }

    pub(crate) fn from_raw(p: &TafPresentation, levels: Vec<LevelSets>) -> Self {
        let depth = levels.len();
        Self { fingerprint: p.fingerprint(), levels, saturated: vec![false; depth] }
    }
}

/// The ideal generated by `generators`, computed through `depth` levels:
/// forward push, levelwise closure, then backward saturation to a fixed point.
pub fn generate_ideal(p: &TafPresentation, generators: &[MatrixUnit], depth: usize) -> Result<IdealTable> {
    p.check_level(depth)?;
    let mut table = IdealTable::zero(p, depth)?;
    for g in generators {
        p.check_unit(g)?;
        if g.level > depth {
            return Err(TafError::GeneratorAboveDepth { level: g.level, depth });
        }
        table.levels[g.level - 1][g.summand].insert(g.row, g.col);
    }
    table.propagate(p);
    table.saturate(p);
    Ok(table)
}

fn check_pair(t1: &IdealTable, t2: &IdealTable) -> Result<()> {
    if t1.fingerprint != t2.fingerprint {
        return Err(TafError::MismatchedPresentation);
    }
    Ok(())
}

/// Levelwise intersection at the common depth.
pub fn intersect(t1: &IdealTable, t2: &IdealTable) -> Result<IdealTable> {
    check_pair(t1, t2)?;
    let depth = t1.depth().min(t2.depth());
    let levels = t1.levels[..depth]
        .iter()
        .zip(&t2.levels[..depth])
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.intersection(y)).collect())
        .collect();
    let saturated = (0..depth).map(|i| t1.saturated[i] && t2.saturated[i]).collect();
    Ok(IdealTable { fingerprint: t1.fingerprint, levels, saturated })
}

/// Levelwise union, closure and backward saturation, at depth `depth`.
pub fn join(p: &TafPresentation, t1: &IdealTable, t2: &IdealTable, depth: usize) -> Result<IdealTable> {
    t1.check_presentation(p)?;
    t2.check_presentation(p)?;
    if depth == 0 || depth > t1.depth().min(t2.depth()) {
        return Err(TafError::LevelOutOfRange { level: depth, depth: t1.depth().min(t2.depth()) });
    }
    let mut levels: Vec<LevelSets> = t1.levels[..depth].to_vec();
    for (level, other) in levels.iter_mut().zip(&t2.levels[..depth]) {
        for (set, o) in level.iter_mut().zip(other) {
            set.union_with(o);
        }
    }
    let mut table = IdealTable::from_raw(p, levels);
    table.propagate(p);
    table.saturate(p);
    Ok(table)
}

/// Whether `t1 ⊇ t2` levelwise, at the common depth.
pub fn contains(t1: &IdealTable, t2: &IdealTable) -> Result<bool> {
    check_pair(t1, t2)?;
    let depth = t1.depth().min(t2.depth());
    Ok(t1.levels[..depth].iter().zip(&t2.levels[..depth]).all(|(a, b)| a.iter().zip(b).all(|(x, y)| y.is_subset(x))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn u(level: usize, k: usize, l: usize) -> MatrixUnit {
        MatrixUnit::new(level, 0, k, l)
    }

    #[test]
    fn closure_of_middle_diagonal() {
        let p = fixtures::tn(3);
        let sets = levelwise_closure(&p, 1, &[u(1, 2, 2)]).unwrap();
        let got: Vec<_> = sets[0].units().collect();
        assert_eq!(got, vec![(1, 2), (1, 3), (2, 2), (2, 3)]);
        assert!(levelwise_closure(&p, 1, &[]).unwrap()[0].is_empty());
        let corner = levelwise_closure(&p, 1, &[u(1, 1, 3)]).unwrap();
        assert_eq!(corner[0].units().collect::<Vec<_>>(), vec![(1, 3)]);
        assert_eq!(levelwise_closure(&fixtures::ref2(2), 1, &[u(2, 1, 1)]).unwrap_err(), TafError::MixedLevels);
    }

    #[test]
    fn corners_regenerate_the_set() {
        let set = ClosedSet::from_units(5, [(2, 3), (4, 5), (1, 2)]);
        let again = ClosedSet::from_units(5, set.corners());
        assert_eq!(set, again);
        assert_eq!(set.corners(), vec![(1, 2), (2, 3), (4, 5)]);
    }

    #[test]
    fn generated_single_level_is_a_quadrant() {
        let p = fixtures::tn(4);
        let t = generate_ideal(&p, &[u(1, 2, 3)], 1).unwrap();
        let expected: Vec<_> =
            (1..=4).flat_map(|k| (k..=4).map(move |l| (k, l))).filter(|&(k, l)| k <= 2 && l >= 3).collect();
        assert_eq!(t.level(1)[0].units().collect::<Vec<_>>(), expected);
        assert!(generate_ideal(&p, &[], 1).unwrap().is_zero());
    }

    #[test]
    fn generated_ref2_pushes_and_closes() {
        let p = fixtures::ref2(3);
        let t = generate_ideal(&p, &[u(1, 1, 2)], 3).unwrap();
        t.check_invariants(&p).unwrap();
        assert_eq!(t.level(1)[0].units().collect::<Vec<_>>(), vec![(1, 2)]);
        let images = p.push_to_depth(&u(1, 1, 2), 3).unwrap();
        let closed = ClosedSet::from_units(8, images.iter().map(|v| (v.row, v.col)));
        assert_eq!(t.level(3)[0], closed);
        assert_eq!(
            generate_ideal(&p, &[u(3, 1, 1)], 2).unwrap_err(),
            TafError::GeneratorAboveDepth { level: 3, depth: 2 }
        );
    }

    #[test]
    fn membership_in_wedge() {
        // wedge J(2,2) of T_3 is generated by the diagonal units off [2,2]
        let p = fixtures::tn(3);
        let j = generate_ideal(&p, &[u(1, 1, 1), u(1, 3, 3)], 1).unwrap();
        assert_eq!(j.membership(&u(1, 2, 2)), Membership::OutAtDepth { depth: 1 });
        assert_eq!(j.membership(&u(1, 1, 1)), Membership::In);
        let zero = IdealTable::zero(&p, 1).unwrap();
        assert_eq!(zero.membership(&u(1, 1, 3)), Membership::OutAtDepth { depth: 1 });
    }

    #[test]
    fn t2_meet_of_the_two_diagonal_ideals() {
        let p = fixtures::tn(2);
        let top = generate_ideal(&p, &[u(1, 1, 1)], 1).unwrap();
        let bottom = generate_ideal(&p, &[u(1, 2, 2)], 1).unwrap();
        assert_eq!(top.level(1)[0].units().collect::<Vec<_>>(), vec![(1, 1), (1, 2)]);
        assert_eq!(bottom.level(1)[0].units().collect::<Vec<_>>(), vec![(1, 2), (2, 2)]);
        let meet = intersect(&top, &bottom).unwrap();
        assert_eq!(meet.level(1)[0].units().collect::<Vec<_>>(), vec![(1, 2)]);
        assert!(contains(&top, &meet).unwrap() && contains(&bottom, &meet).unwrap());
        assert!(!contains(&meet, &top).unwrap());
        let zero = IdealTable::zero(&p, 1).unwrap();
        assert_eq!(join(&p, &top, &zero, 1).unwrap(), top);
        assert_eq!(intersect(&top, &top).unwrap(), top);
    }

    #[test]
    fn t3_join_of_two_wedges() {
        let p = fixtures::tn(3);
        // J(1,1) = units outside [1,1]; J(3,3) = units outside [3,3]
        let w11 = generate_ideal(&p, &[u(1, 2, 2), u(1, 3, 3)], 1).unwrap();
        let w33 = generate_ideal(&p, &[u(1, 1, 1), u(1, 2, 2)], 1).unwrap();
        let j = join(&p, &w11, &w33, 1).unwrap();
        assert!(j.is_whole());
        let m = intersect(&w11, &w33).unwrap();
        // everything except (1,1) and (3,3)
        assert_eq!(m.level(1)[0].len(), 4);
        assert!(!m.contains_unit(&u(1, 1, 1)) && !m.contains_unit(&u(1, 3, 3)));
    }

    #[test]
    fn mismatched_presentations() {
        let a = IdealTable::zero(&fixtures::tn(2), 1).unwrap();
        let b = IdealTable::zero(&fixtures::tn(3), 1).unwrap();
        assert_eq!(intersect(&a, &b).unwrap_err(), TafError::MismatchedPresentation);
        assert_eq!(join(&fixtures::tn(3), &a, &b, 1).unwrap_err(), TafError::MismatchedPresentation);
    }

    #[test]
    fn from_level_sets_rejects_bad_tables() {
        let p = fixtures::tn(2);
        assert!(IdealTable::from_level_sets(&p, &[vec![vec![(1, 1)]]]).is_err());
        let ok = IdealTable::from_level_sets(&p, &[vec![vec![(1, 1), (1, 2)]]]).unwrap();
        assert_eq!(ok.unit_count(), 2);
        let q = fixtures::ref2(2);
        // level 1 unit without its images at level 2
        assert!(IdealTable::from_level_sets(&q, &[vec![vec![(1, 2)]], vec![vec![]]]).is_err());
    }

    #[test]
    fn pull_matches_brute_force() {
        let p = fixtures::swap(4);
        for level in 1..4 {
            let next: LevelSets =
                p.level_sizes(level + 1).iter().map(|&n| ClosedSet::from_units(n, [(1.min(n), n)])).collect();
            let pulled = pull_sets(&p, level, &next);
            for v in p.units_at(level) {
                let all_in = p.push_matrix_unit(&v).unwrap().iter().all(|w| next[w.summand].contains(w.row, w.col));
                assert_eq!(pulled[v.summand].contains(v.row, v.col), all_in, "{v}");
            }
        }
    }

    fn unit_strategy(sizes: Vec<usize>) -> impl Strategy<Value = (usize, usize, usize)> {
        let max = *sizes.iter().max().unwrap();
        (0..sizes.len(), 1..=max, 1..=max).prop_map(move |(lvl, a, b)| {
            let n = sizes[lvl];
            let (a, b) = ((a - 1) % n + 1, (b - 1) % n + 1);
            (lvl + 1, a.min(b), a.max(b))
        })
    }

    proptest! {
        #[test]
        fn closure_is_idempotent(pairs in proptest::collection::vec((1usize..=7, 1usize..=7), 0..6)) {
            let units: Vec<_> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
            let once = ClosedSet::from_units(7, units);
            let twice = ClosedSet::from_units(7, once.units().collect::<Vec<_>>());
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn lattice_laws(a in proptest::collection::vec(unit_strategy(vec![2, 4, 8]), 0..4),
                        b in proptest::collection::vec(unit_strategy(vec![2, 4, 8]), 0..4),
                        c in proptest::collection::vec(unit_strategy(vec![2, 4, 8]), 0..4)) {
            let p = fixtures::ref2(3);
            let gen = |v: &Vec<(usize, usize, usize)>| {
                let units: Vec<_> = v.iter().map(|&(lv, k, l)| MatrixUnit::new(lv, 0, k, l)).collect();
                generate_ideal(&p, &units, 3).unwrap()
            };
            let (ta, tb, tc) = (gen(&a), gen(&b), gen(&c));
            for t in [&ta, &tb, &tc] {
                t.check_invariants(&p).unwrap();
            }
            prop_assert_eq!(intersect(&ta, &tb).unwrap(), intersect(&tb, &ta).unwrap());
            prop_assert_eq!(join(&p, &ta, &tb, 3).unwrap(), join(&p, &tb, &ta, 3).unwrap());
            prop_assert_eq!(
                intersect(&intersect(&ta, &tb).unwrap(), &tc).unwrap(),
                intersect(&ta, &intersect(&tb, &tc).unwrap()).unwrap()
            );
            prop_assert_eq!(
                join(&p, &join(&p, &ta, &tb, 3).unwrap(), &tc, 3).unwrap(),
                join(&p, &ta, &join(&p, &tb, &tc, 3).unwrap(), 3).unwrap()
            );
            prop_assert_eq!(join(&p, &ta, &intersect(&ta, &tb).unwrap(), 3).unwrap(), ta.clone());
            prop_assert_eq!(intersect(&ta, &join(&p, &ta, &tb, 3).unwrap()).unwrap(), ta.clone());
        }
    }
}
