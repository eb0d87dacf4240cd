//! Brute-force ground truth on small instances.
//!
//! Nothing here uses the ideal calculus: units are bits of a `u128`, closure and
//! push/pull are recomputed from the arm data, and meet-irreducibility is tested
//! by definition over the whole lattice.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::diagram::{MatrixUnit, TafPresentation};
use crate::envelope::build_envelope;
use crate::error::{Result, TafError};
use crate::ideal::IdealTable;
use crate::primitivity::analyze_envelope;

pub type Mask = u128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleBounds {
    pub max_n: usize,
    pub max_units: usize,
}

impl Default for OracleBounds {
    fn default() -> Self {
        Self { max_n: 6, max_units: 64 }
    }
}

impl OracleBounds {
    /// Defaults overridden by `TAF_ORACLE_MAX_N` and `TAF_ORACLE_MAX_UNITS`.
    pub fn from_env() -> Self {
        let read =
            |key: &str, default: usize| std::env::var(key).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(default);
        let d = Self::default();
        Self { max_n: read("TAF_ORACLE_MAX_N", d.max_n), max_units: read("TAF_ORACLE_MAX_UNITS", d.max_units).min(128) }
    }
}

/// The upper-triangular units of one level, numbered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSpace {
    pub sizes: Vec<usize>,
    pub units: Vec<(usize, usize, usize)>,
    index: HashMap<(usize, usize, usize), usize>,
    /// Bits of all units generated by each unit inside its summand.
    up: Vec<Mask>,
}

impl UnitSpace {
    pub fn new(sizes: &[usize]) -> Self {
        let units: Vec<_> = sizes
            .iter()
            .enumerate()
            .flat_map(|(s, &n)| (1..=n).flat_map(move |k| (k..=n).map(move |l| (s, k, l))))
            .collect();
        let index: HashMap<_, _> = units.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let up = units
            .iter()
            .map(|&(s, k, l)| {
                units
                    .iter()
                    .enumerate()
                    .filter(|&(_, &(s2, k2, l2))| s2 == s && k2 <= k && l2 >= l)
                    .fold(0, |m, (i, _)| m | 1 << i)
            })
            .collect();
        Self { sizes: sizes.to_vec(), units, index, up }
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn bit(&self, s: usize, k: usize, l: usize) -> Mask {
        1 << self.index[&(s, k, l)]
    }

    pub fn full(&self) -> Mask {
        if self.len() == 128 {
            Mask::MAX
        } else {
            (1 << self.len()) - 1
        }
    }

    pub fn closure(&self, mask: Mask) -> Mask {
        (0..self.len()).filter(|&i| mask >> i & 1 == 1).fold(mask, |m, i| m | self.up[i])
    }

    pub fn is_closed(&self, mask: Mask) -> bool {
        self.closure(mask) == mask
    }

    pub fn units_of(&self, mask: Mask) -> Vec<(usize, usize, usize)> {
        (0..self.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.units[i]).collect()
    }

    /// Closed sets of every summand by row-boundary profiles, combined as products.
    pub fn closed_sets_by_profile(&self) -> Vec<Mask> {
        let mut out = vec![0];
        for (s, &n) in self.sizes.iter().enumerate() {
            let mut per = Vec::new();
            profiles(n, 1, 1, &mut Vec::new(), &mut per);
            let masks: Vec<Mask> = per
                .iter()
                .map(|t| {
                    (1..=n).flat_map(|k| (t[k - 1]..=n).map(move |l| (k, l))).fold(0, |m, (k, l)| m | self.bit(s, k, l))
                })
                .collect();
            out = out.iter().flat_map(|&a| masks.iter().map(move |&b| a | b)).collect();
        }
        out.sort_unstable();
        out
    }

    /// Closed sets by filtering every subset.
    pub fn closed_sets_by_subsets(&self) -> Vec<Mask> {
        assert!(self.len() <= 24, "subset filter is exponential");
        (0..(1 as Mask) << self.len()).filter(|&m| self.is_closed(m)).collect()
    }
}

/// Nondecreasing thresholds `t(k)` with `k <= t(k) <= n + 1`.
fn profiles(n: usize, k: usize, floor: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k > n {
        out.push(cur.clone());
        return;
    }
    for t in floor.max(k)..=n + 1 {
        cur.push(t);
        profiles(n, k + 1, t, cur, out);
        cur.pop();
    }
}

/// Level-1 to level-2 images of each level-1 unit, straight from the arm list.
fn image_table(p: &TafPresentation, lower: &UnitSpace, upper: &UnitSpace) -> Vec<Mask> {
    lower
        .units
        .iter()
        .map(|&(s, k, l)| {
            p.arms()
                .iter()
                .filter(|a| a.level == 1 && a.source == s)
                .fold(0, |m, a| m | upper.bit(a.target, a.injection[k - 1], a.injection[l - 1]))
        })
        .collect()
}

/// An ideal as one unit mask per level.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OracleIdeal {
    pub levels: Vec<Mask>,
}

impl OracleIdeal {
    pub fn contains(&self, other: &Self) -> bool {
        self.levels.iter().zip(&other.levels).all(|(a, b)| a & b == *b)
    }

    pub fn unit_count(&self) -> u32 {
        self.levels.iter().map(|m| m.count_ones()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealLattice {
    pub descriptor: String,
    pub spaces: Vec<UnitSpace>,
    pub ideals: Vec<OracleIdeal>,
    images: Vec<Mask>,
    lookup: HashMap<OracleIdeal, usize>,
}

impl IdealLattice {
    fn new(descriptor: String, spaces: Vec<UnitSpace>, images: Vec<Mask>, mut ideals: Vec<OracleIdeal>) -> Self {
        ideals.sort_by_key(|i| (i.unit_count(), i.clone()));
        let lookup = ideals.iter().enumerate().map(|(i, j)| (j.clone(), i)).collect();
        Self { descriptor, spaces, ideals, images, lookup }
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn index_of(&self, ideal: &OracleIdeal) -> Option<usize> {
        self.lookup.get(ideal).copied()
    }

    pub fn zero(&self) -> usize {
        self.index_of(&OracleIdeal { levels: vec![0; self.spaces.len()] }).expect("zero ideal")
    }

    pub fn whole(&self) -> usize {
        self.index_of(&OracleIdeal { levels: self.spaces.iter().map(UnitSpace::full).collect() }).expect("whole")
    }

    fn pull(&self, upper: Mask) -> Mask {
        self.images.iter().enumerate().filter(|(_, &img)| img & upper == img).fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        let levels = self.ideals[a].levels.iter().zip(&self.ideals[b].levels).map(|(x, y)| x & y).collect();
        self.index_of(&OracleIdeal { levels }).expect("lattice closed under meet")
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        let top = self.spaces.len() - 1;
        let mut levels: Vec<Mask> =
            self.ideals[a].levels.iter().zip(&self.ideals[b].levels).map(|(x, y)| x | y).collect();
        levels[top] = self.spaces[top].closure(levels[top]);
        if top == 1 {
            levels[0] = self.pull(levels[1]);
        }
        self.index_of(&OracleIdeal { levels }).expect("lattice closed under join")
    }

    /// Converts a member to an ideal table of `p`.
    pub fn to_table(&self, p: &TafPresentation, idx: usize) -> Result<IdealTable> {
        let sets: Vec<Vec<Vec<(usize, usize)>>> = self
            .spaces
            .iter()
            .zip(&self.ideals[idx].levels)
            .map(|(space, &m)| {
                let mut per = vec![Vec::new(); space.sizes.len()];
                for (s, k, l) in space.units_of(m) {
                    per[s].push((k, l));
                }
                per
            })
            .collect();
        IdealTable::from_level_sets(p, &sets)
    }

    /// Locates an ideal table (through the lattice's depth) among the members.
    pub fn find_table(&self, j: &IdealTable) -> Option<usize> {
        if j.depth() < self.spaces.len() {
            return None;
        }
        let levels = self
            .spaces
            .iter()
            .enumerate()
            .map(|(i, space)| j.units_at(i + 1).iter().fold(0, |m, u| m | space.bit(u.summand, u.row, u.col)))
            .collect();
        self.index_of(&OracleIdeal { levels })
    }

    /// Member units as matrix units, for export.
    pub fn units(&self, idx: usize) -> Vec<MatrixUnit> {
        self.spaces
            .iter()
            .zip(&self.ideals[idx].levels)
            .enumerate()
            .flat_map(|(i, (space, &m))| {
                space.units_of(m).into_iter().map(move |(s, k, l)| MatrixUnit::new(i + 1, s, k, l))
            })
            .collect()
    }
}

fn check_size(n: usize, bounds: &OracleBounds) -> Result<()> {
    if n > bounds.max_n || n * (n + 1) / 2 > bounds.max_units.min(128) {
        return Err(TafError::OracleTooLarge(format!("T_{n} exceeds bounds {bounds:?}")));
    }
    Ok(())
}

/// All ideals of `T_n`, enumerated through boundary profiles.
pub fn enumerate_ideals_tn(n: usize, bounds: &OracleBounds) -> Result<IdealLattice> {
    check_size(n, bounds)?;
    let space = UnitSpace::new(&[n]);
    let ideals = space.closed_sets_by_profile().into_iter().map(|m| OracleIdeal { levels: vec![m] }).collect();
    Ok(IdealLattice::new(format!("T_{n}"), vec![space], Vec::new(), ideals))
}

/// Units `(k, l)` with `not (i0 <= k and l <= j0)`.
pub fn wedge_ideal(n: usize, i0: usize, j0: usize) -> Result<OracleIdeal> {
    if !(1 <= i0 && i0 <= j0 && j0 <= n) {
        return Err(TafError::Structural(format!("wedge ({i0},{j0}) outside 1..={n}")));
    }
    let space = UnitSpace::new(&[n]);
    let m =
        space.units.iter().filter(|&&(_, k, l)| !(i0 <= k && l <= j0)).fold(0, |m, &(s, k, l)| m | space.bit(s, k, l));
    debug_assert!(space.is_closed(m));
    Ok(OracleIdeal { levels: vec![m] })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MiVerdict {
    pub irreducible: bool,
    /// False for the whole algebra, which is excluded from meet-irreducible counts.
    pub proper: bool,
    /// Two ideals properly containing `J` whose intersection is `J`.
    pub witness: Option<(usize, usize)>,
}

impl MiVerdict {
    /// Proper and meet-irreducible.
    pub fn counts(&self) -> bool {
        self.proper && self.irreducible
    }
}

pub fn is_meet_irreducible_bruteforce(lattice: &IdealLattice, j: usize) -> MiVerdict {
    let proper = j != lattice.whole();
    let above: Vec<usize> =
        (0..lattice.len()).filter(|&i| i != j && lattice.ideals[i].contains(&lattice.ideals[j])).collect();
    for (x, &a) in above.iter().enumerate() {
        for &b in &above[x + 1..] {
            if lattice.meet(a, b) == j {
                return MiVerdict { irreducible: false, proper, witness: Some((a, b)) };
            }
        }
    }
    MiVerdict { irreducible: true, proper, witness: None }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WedgeReport {
    pub n: usize,
    pub ideal_count: usize,
    /// `(i0, j0)` of each proper meet-irreducible ideal, which must all be wedges.
    pub mi_wedges: Vec<(usize, usize)>,
    pub non_wedge_mi: usize,
    pub passed: bool,
}

pub fn verify_wedge_theorem(n: usize, bounds: &OracleBounds) -> Result<WedgeReport> {
    let lattice = enumerate_ideals_tn(n, bounds)?;
    let mut wedges = HashMap::new();
    for i0 in 1..=n {
        for j0 in i0..=n {
            wedges.insert(wedge_ideal(n, i0, j0)?, (i0, j0));
        }
    }
    let mut mi_wedges = Vec::new();
    let mut non_wedge_mi = 0;
    for j in 0..lattice.len() {
        if is_meet_irreducible_bruteforce(&lattice, j).counts() {
            match wedges.get(&lattice.ideals[j]) {
                Some(&w) => mi_wedges.push(w),
                None => non_wedge_mi += 1,
            }
        }
    }
    mi_wedges.sort_unstable();
    let passed = non_wedge_mi == 0 && mi_wedges.len() == n * (n + 1) / 2;
    Ok(WedgeReport { n, ideal_count: lattice.len(), mi_wedges, non_wedge_mi, passed })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnvelopeTheoremReport {
    pub n: usize,
    pub ideal_count: usize,
    pub mi_count: usize,
    pub primitive_count: usize,
    /// Lattice indices where the two sides disagree.
    pub disagreements: Vec<usize>,
    pub passed: bool,
}

/// Meet-irreducibility against primitivity of the envelope for every ideal of `T_n`.
pub fn verify_envelope_theorem(n: usize, bounds: &OracleBounds) -> Result<EnvelopeTheoremReport> {
    let lattice = enumerate_ideals_tn(n, bounds)?;
    let p = TafPresentation::new(vec![vec![n]], Vec::new(), None)?;
    compare_on_lattice(&p, &lattice, n)
}

fn compare_on_lattice(p: &TafPresentation, lattice: &IdealLattice, n: usize) -> Result<EnvelopeTheoremReport> {
    let depth = p.depth();
    let (mut mi_count, mut primitive_count, mut disagreements) = (0, 0, Vec::new());
    for j in 0..lattice.len() {
        let mi = is_meet_irreducible_bruteforce(lattice, j).counts();
        let table = lattice.to_table(p, j)?;
        let env = build_envelope(p, &table, depth, 1)?;
        let primitive = analyze_envelope(&env)?.is_primitive();
        mi_count += mi as usize;
        primitive_count += primitive as usize;
        if mi != primitive {
            disagreements.push(j);
        }
    }
    let passed = disagreements.is_empty();
    Ok(EnvelopeTheoremReport { n, ideal_count: lattice.len(), mi_count, primitive_count, disagreements, passed })
}

/// Envelope theorem on every ideal of a two-level presentation.
pub fn verify_envelope_theorem_two_level(p: &TafPresentation, bounds: &OracleBounds) -> Result<EnvelopeTheoremReport> {
    let lattice = enumerate_ideals_two_level(p, bounds)?;
    let n = p.level_sizes(p.depth()).iter().sum();
    compare_on_lattice(p, &lattice, n)
}

/// All ideals of a presentation with at most two levels, as pairs `(S_1, S_2)`
/// of closed sets with `S_1 = {u : push(u) in S_2}`.
pub fn enumerate_ideals_two_level(p: &TafPresentation, bounds: &OracleBounds) -> Result<IdealLattice> {
    if p.depth() > 2 {
        return Err(TafError::OracleTooLarge(format!("{} levels; at most 2 supported", p.depth())));
    }
    let spaces: Vec<UnitSpace> = (1..=p.depth()).map(|l| UnitSpace::new(p.level_sizes(l))).collect();
    let total: usize = spaces.iter().map(UnitSpace::len).sum();
    let widest = spaces.iter().flat_map(|s| s.sizes.iter().copied()).max().unwrap_or(0);
    if total > bounds.max_units.min(128) || widest > bounds.max_n {
        return Err(TafError::OracleTooLarge(format!("{total} units exceed bounds {bounds:?}")));
    }
    if p.depth() == 1 {
        let ideals = spaces[0].closed_sets_by_profile().into_iter().map(|m| OracleIdeal { levels: vec![m] }).collect();
        return Ok(IdealLattice::new(format!("{:?}", p.level_sizes(1)), spaces, Vec::new(), ideals));
    }
    let images = image_table(p, &spaces[0], &spaces[1]);
    let pull =
        |upper: Mask| images.iter().enumerate().filter(|(_, &img)| img & upper == img).fold(0, |m, (i, _)| m | 1 << i);
    let lower_sets = spaces[0].closed_sets_by_profile();
    let mut ideals = Vec::new();
    for s2 in spaces[1].closed_sets_by_profile() {
        let pulled = pull(s2);
        for &s1 in &lower_sets {
            if s1 == pulled {
                ideals.push(OracleIdeal { levels: vec![s1, s2] });
            }
        }
    }
    let descriptor = format!("{:?} -> {:?}", p.level_sizes(1), p.level_sizes(2));
    Ok(IdealLattice::new(descriptor, spaces, images, ideals))
}

/// The same lattice built as all joins of principal ideals, closing from zero.
pub fn ideals_from_generators(lattice: &IdealLattice) -> BTreeSet<OracleIdeal> {
    let top = lattice.spaces.len() - 1;
    let principal: Vec<OracleIdeal> = lattice
        .spaces
        .iter()
        .enumerate()
        .flat_map(|(level, space)| (0..space.len()).map(move |i| (level, space, 1 << i)))
        .map(|(level, space, bit): (usize, &UnitSpace, Mask)| {
            let mut levels = vec![0; lattice.spaces.len()];
            levels[level] = space.closure(bit);
            if level == 0 && top == 1 {
                levels[1] = lattice.spaces[1].closure(lattice.images[bit.trailing_zeros() as usize]);
            }
            if top == 1 {
                levels[0] |= lattice.pull(levels[1]);
            }
            OracleIdeal { levels }
        })
        .collect();
    let zero = OracleIdeal { levels: vec![0; lattice.spaces.len()] };
    let mut found = BTreeSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(cur) = frontier.pop() {
        for g in &principal {
            let mut levels: Vec<Mask> = cur.levels.iter().zip(&g.levels).map(|(a, b)| a | b).collect();
            levels[top] = lattice.spaces[top].closure(levels[top]);
            if top == 1 {
                levels[0] = lattice.pull(levels[1]);
            }
            let next = OracleIdeal { levels };
            if found.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    found
}
