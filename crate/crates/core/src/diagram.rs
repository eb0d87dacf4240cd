//! Presentations of strongly maximal TAF algebras as finite Bratteli diagrams.
//!
//! Each level is a list of upper-triangular summands `T_n`. An embedding between
//! consecutive levels is a family of parallel arms, each a strictly increasing
//! injection of positions. Matrix units are pushed forward arm by arm.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TafError};

/// Standard matrix unit `e_{row,col}` of summand `summand` at `level`.
///
/// Levels and positions are 1-based, summand ids are 0-based indices into the
/// level's summand list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MatrixUnit {
    pub level: usize,
    pub summand: usize,
    pub row: usize,
    pub col: usize,
}

impl MatrixUnit {
    pub const fn new(level: usize, summand: usize, row: usize, col: usize) -> Self {
        Self { level, summand, row, col }
    }

    pub fn is_diagonal(&self) -> bool {
        self.row == self.col
    }
}

impl fmt::Display for MatrixUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^({},{})_({},{})", self.level, self.summand, self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Summand {
    pub level: usize,
    pub id: usize,
    pub size: usize,
}

/// One multiplicity-one copy of a summand inside a summand of the next level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmbeddingArm {
    /// Source level `i`; the target lives at level `i + 1`.
    pub level: usize,
    pub source: usize,
    pub target: usize,
    /// `injection[k - 1]` is the image of position `k`.
    pub injection: Vec<usize>,
}

impl EmbeddingArm {
    #[inline]
    pub fn apply(&self, position: usize) -> usize {
        self.injection[position - 1]
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.injection.windows(2).all(|w| w[0] < w[1])
    }
}

/// How generated arms into one target are laid out.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// Incoming copies occupy consecutive blocks, in template order.
    #[default]
    Block,
    /// Incoming copies (all of equal size) are interleaved position by position.
    Interleave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TemplateArm {
    pub source: usize,
    pub target: usize,
}

/// The summand types (summand indices at `from_level`) and arm pattern that
/// repeat at every level from `from_level` on. Sizes follow the cover equation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StationaryTemplate {
    pub from_level: usize,
    pub arms: Vec<TemplateArm>,
    #[serde(default)]
    pub layout: Layout,
}

impl StationaryTemplate {
    /// Sizes and arms of the level following one with `sizes`.
    pub fn step(&self, sizes: &[usize], level: usize) -> Result<(Vec<usize>, Vec<EmbeddingArm>)> {
        let types = sizes.len();
        for a in &self.arms {
            if a.source >= types || a.target >= types {
                return Err(TafError::InvalidTemplate(format!(
                    "arm {}->{} references a type outside 0..{types}",
                    a.source, a.target
                )));
            }
        }
        let mut next = vec![0usize; types];
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); types];
        for (idx, a) in self.arms.iter().enumerate() {
            next[a.target] += sizes[a.source];
            incoming[a.target].push(idx);
        }
        if let Some(q) = incoming.iter().position(Vec::is_empty) {
            return Err(TafError::InvalidTemplate(format!("type {q} has no incoming arm")));
        }
        let mut injections: Vec<Vec<usize>> = vec![Vec::new(); self.arms.len()];
        for arms_in in &incoming {
            match self.layout {
                Layout::Block => {
                    let mut offset = 0;
                    for &idx in arms_in {
                        let n = sizes[self.arms[idx].source];
                        injections[idx] = (1..=n).map(|k| offset + k).collect();
                        offset += n;
                    }
                }
                Layout::Interleave => {
                    let n = sizes[self.arms[arms_in[0]].source];
                    if arms_in.iter().any(|&idx| sizes[self.arms[idx].source] != n) {
                        return Err(TafError::InvalidTemplate("interleave layout needs equal source sizes".into()));
                    }
                    let m = arms_in.len();
                    for (j, &idx) in arms_in.iter().enumerate() {
                        injections[idx] = (1..=n).map(|k| (k - 1) * m + j + 1).collect();
                    }
                }
            }
        }
        let arms = self
            .arms
            .iter()
            .zip(injections)
            .map(|(a, injection)| EmbeddingArm { level, source: a.source, target: a.target, injection })
            .collect();
        Ok((next, arms))
    }
}

/// A depth-truncated presentation `A = lim (A_i, phi_i)`.
#[derive(Debug, Clone)]
pub struct TafPresentation {
    levels: Vec<Vec<usize>>,
    arms: Vec<EmbeddingArm>,
    stationary: Option<StationaryTemplate>,
    outgoing: Vec<Vec<Vec<usize>>>,
    incoming: Vec<Vec<Vec<usize>>>,
}

impl PartialEq for TafPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels && self.arms == other.arms && self.stationary == other.stationary
    }
}

impl Eq for TafPresentation {}

impl Hash for TafPresentation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.levels.hash(state);
        self.arms.hash(state);
        self.stationary.hash(state);
    }
}

impl TafPresentation {
    /// Builds a presentation, rejecting malformed index references.
    /// Cover and monotonicity invariants are checked by [`validate_presentation`].
    pub fn new(
        levels: Vec<Vec<usize>>,
        arms: Vec<EmbeddingArm>,
        stationary: Option<StationaryTemplate>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(TafError::Structural("presentation has no levels".into()));
        }
        for (i, level) in levels.iter().enumerate() {
            if level.is_empty() {
                return Err(TafError::Structural(format!("level {} has no summands", i + 1)));
            }
            if let Some(j) = level.iter().position(|&s| s == 0) {
                return Err(TafError::Structural(format!("summand {j} at level {} has size 0", i + 1)));
            }
        }
        let depth = levels.len();
        for (idx, arm) in arms.iter().enumerate() {
            if arm.level == 0 || arm.level >= depth {
                return Err(TafError::Structural(format!(
                    "arm {idx}: source level {} has no successor level",
                    arm.level
                )));
            }
            let src = &levels[arm.level - 1];
            let tgt = &levels[arm.level];
            if arm.source >= src.len() {
                return Err(TafError::Structural(format!(
                    "arm {idx}: source summand {} missing at level {}",
                    arm.source, arm.level
                )));
            }
            if arm.target >= tgt.len() {
                return Err(TafError::Structural(format!(
                    "arm {idx}: target summand {} missing at level {}",
                    arm.target,
                    arm.level + 1
                )));
            }
            if arm.injection.len() != src[arm.source] {
                return Err(TafError::Structural(format!(
                    "arm {idx}: injection has {} entries, source size is {}",
                    arm.injection.len(),
                    src[arm.source]
                )));
            }
            let n = tgt[arm.target];
            if let Some(&bad) = arm.injection.iter().find(|&&p| p == 0 || p > n) {
                return Err(TafError::Structural(format!("arm {idx}: image position {bad} outside 1..={n}")));
            }
        }
        if let Some(t) = &stationary {
            if t.from_level == 0 || t.from_level > depth {
                return Err(TafError::Structural(format!(
                    "stationary from_level {} outside 1..={depth}",
                    t.from_level
                )));
            }
            let types = levels[t.from_level - 1].len();
            if t.arms.iter().any(|a| a.source >= types || a.target >= types) {
                return Err(TafError::Structural("template arm references a missing type".into()));
            }
        }
        let mut outgoing: Vec<Vec<Vec<usize>>> = levels.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        let mut incoming: Vec<Vec<Vec<usize>>> = levels.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for (idx, arm) in arms.iter().enumerate() {
            outgoing[arm.level - 1][arm.source].push(idx);
            incoming[arm.level][arm.target].push(idx);
        }
        Ok(Self { levels, arms, stationary, outgoing, incoming })
    }

    /// Unrolls a stationary pattern from `initial` sizes at level 1 to `depth` levels.
    pub fn from_template(initial: Vec<usize>, arms: Vec<TemplateArm>, layout: Layout, depth: usize) -> Result<Self> {
        let template = StationaryTemplate { from_level: 1, arms, layout };
        let base = Self::new(vec![initial], Vec::new(), Some(template))?;
        base.extend_stationary(depth.saturating_sub(1))
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level_sizes(&self, level: usize) -> &[usize] {
        &self.levels[level - 1]
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn summand_count(&self, level: usize) -> usize {
        self.levels[level - 1].len()
    }

    pub fn size(&self, level: usize, summand: usize) -> usize {
        self.levels[level - 1][summand]
    }

    pub fn summand(&self, level: usize, id: usize) -> Summand {
        Summand { level, id, size: self.size(level, id) }
    }

    pub fn summands(&self) -> impl Iterator<Item = Summand> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().enumerate().map(move |(id, &size)| Summand { level: i + 1, id, size }))
    }

    pub fn arms(&self) -> &[EmbeddingArm] {
        &self.arms
    }

    pub fn arm(&self, idx: usize) -> &EmbeddingArm {
        &self.arms[idx]
    }

    pub fn stationary(&self) -> Option<&StationaryTemplate> {
        self.stationary.as_ref()
    }

    /// Indices of the arms leaving `summand` at `level`.
    pub fn outgoing(&self, level: usize, summand: usize) -> &[usize] {
        &self.outgoing[level - 1][summand]
    }

    /// Indices of the arms entering `summand` at `level`.
    pub fn incoming(&self, level: usize, summand: usize) -> &[usize] {
        &self.incoming[level - 1][summand]
    }

    /// Stable identity used to tie derived tables to their presentation.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        if level == 0 || level > self.depth() {
            return Err(TafError::LevelOutOfRange { level, depth: self.depth() });
        }
        Ok(())
    }

    pub fn check_unit(&self, u: &MatrixUnit) -> Result<()> {
        self.check_level(u.level)?;
        if u.summand >= self.summand_count(u.level) {
            return Err(TafError::InvalidUnit(*u));
        }
        let n = self.size(u.level, u.summand);
        if u.row == 0 || u.row > u.col || u.col > n {
            return Err(TafError::InvalidUnit(*u));
        }
        Ok(())
    }

    /// All upper-triangular units at `level`, ordered by summand, row, column.
    pub fn units_at(&self, level: usize) -> impl Iterator<Item = MatrixUnit> + '_ {
        self.levels[level - 1]
            .iter()
            .enumerate()
            .flat_map(move |(s, &n)| (1..=n).flat_map(move |k| (k..=n).map(move |l| MatrixUnit::new(level, s, k, l))))
    }

    /// The image of `u` in `A_{level+1}`, one unit per outgoing arm.
    pub fn push_matrix_unit(&self, u: &MatrixUnit) -> Result<Vec<MatrixUnit>> {
        self.check_unit(u)?;
        if u.level >= self.depth() {
            return Err(TafError::LevelOutOfRange { level: u.level + 1, depth: self.depth() });
        }
        Ok(self
            .outgoing(u.level, u.summand)
            .iter()
            .map(|&idx| {
                let arm = &self.arms[idx];
                MatrixUnit::new(u.level + 1, arm.target, arm.apply(u.row), arm.apply(u.col))
            })
            .collect())
    }

    /// Iterated push of `u` to level `d`.
    pub fn push_to_depth(&self, u: &MatrixUnit, d: usize) -> Result<BTreeSet<MatrixUnit>> {
        self.check_unit(u)?;
        if d < u.level || d > self.depth() {
            return Err(TafError::LevelOutOfRange { level: d, depth: self.depth() });
        }
        let mut current = BTreeSet::from([*u]);
        for _ in u.level..d {
            let mut next = BTreeSet::new();
            for v in &current {
                next.extend(self.push_matrix_unit(v)?);
            }
            current = next;
        }
        Ok(current)
    }

    /// Appends `extra_levels` levels generated by the stationary template.
    pub fn extend_stationary(&self, extra_levels: usize) -> Result<Self> {
        let template = self.stationary.clone().ok_or(TafError::MissingTemplate)?;
        let mut levels = self.levels.clone();
        let mut arms = self.arms.clone();
        for _ in 0..extra_levels {
            let level = levels.len();
            let (next, new_arms) = template.step(&levels[level - 1], level)?;
            levels.push(next);
            arms.extend(new_arms);
        }
        Self::new(levels, arms, Some(template))
    }

    /// The first `depth` levels as a finite algebra in its own right (the
    /// stationary marker is dropped).
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        self.check_level(depth)?;
        let arms = self.arms.iter().filter(|a| a.level < depth).cloned().collect();
        Self::new(self.levels[..depth].to_vec(), arms, None)
    }

    /// Levels `1..=depth`, keeping the stationary marker when it still applies.
    pub fn prefix(&self, depth: usize) -> Result<Self> {
        self.check_level(depth)?;
        let arms = self.arms.iter().filter(|a| a.level < depth).cloned().collect();
        let stationary = self.stationary.clone().filter(|t| t.from_level <= depth);
        Self::new(self.levels[..depth].to_vec(), arms, stationary)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotIncreasing { arm: usize },
    Overlap { level: usize, target: usize, positions: Vec<usize> },
    Gap { level: usize, target: usize, positions: Vec<usize> },
    NoOutgoingArm { level: usize, summand: usize },
    TemplateMismatch { level: usize, detail: String },
}

fn fmt_positions(p: &[usize]) -> String {
    let shown: Vec<String> = p.iter().take(8).map(usize::to_string).collect();
    if p.len() > 8 {
        format!("{{{},...}}", shown.join(","))
    } else {
        format!("{{{}}}", shown.join(","))
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotIncreasing { arm } => write!(f, "arm {arm}: injection is not strictly increasing"),
            Violation::Overlap { level, target, positions } => {
                write!(f, "level {level} summand {target}: overlap at positions {}", fmt_positions(positions))
            }
            Violation::Gap { level, target, positions } => {
                write!(f, "level {level} summand {target}: gap at {}", fmt_positions(positions))
            }
            Violation::NoOutgoingArm { level, summand } => {
                write!(f, "level {level} summand {summand}: no outgoing arm")
            }
            Violation::TemplateMismatch { level, detail } => {
                write!(f, "level {level}: template mismatch: {detail}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the unital-cover, injectivity, monotonicity and template invariants.
pub fn validate_presentation(p: &TafPresentation) -> ValidationReport {
    let mut violations = Vec::new();
    for (idx, arm) in p.arms().iter().enumerate() {
        if !arm.is_strictly_increasing() {
            violations.push(Violation::NotIncreasing { arm: idx });
        }
    }
    for level in 2..=p.depth() {
        for q in 0..p.summand_count(level) {
            let mut hits = vec![0usize; p.size(level, q)];
            for &idx in p.incoming(level, q) {
                for &pos in &p.arm(idx).injection {
                    hits[pos - 1] += 1;
                }
            }
            let overlap: Vec<usize> = (1..=hits.len()).filter(|&k| hits[k - 1] > 1).collect();
            let gap: Vec<usize> = (1..=hits.len()).filter(|&k| hits[k - 1] == 0).collect();
            if !overlap.is_empty() {
                violations.push(Violation::Overlap { level, target: q, positions: overlap });
            }
            if !gap.is_empty() {
                violations.push(Violation::Gap { level, target: q, positions: gap });
            }
        }
    }
    for level in 1..p.depth() {
        for s in 0..p.summand_count(level) {
            if p.outgoing(level, s).is_empty() {
                violations.push(Violation::NoOutgoingArm { level, summand: s });
            }
        }
    }
    if let Some(t) = p.stationary() {
        let types = p.summand_count(t.from_level);
        for level in t.from_level..p.depth() {
            if p.summand_count(level) != types {
                violations.push(Violation::TemplateMismatch {
                    level,
                    detail: format!("{} summands, template has {types} types", p.summand_count(level)),
                });
                break;
            }
            match t.step(p.level_sizes(level), level) {
                Err(e) => {
                    violations.push(Violation::TemplateMismatch { level, detail: e.to_string() });
                    break;
                }
                Ok((sizes, arms)) => {
                    let actual: Vec<&EmbeddingArm> = p.arms().iter().filter(|a| a.level == level).collect();
                    let expected: Vec<&EmbeddingArm> = arms.iter().collect();
                    if sizes != p.level_sizes(level + 1) || actual != expected {
                        violations.push(Violation::TemplateMismatch {
                            level,
                            detail: "arms or sizes differ from the generated pattern".into(),
                        });
                    }
                }
            }
        }
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GraphNode {
    /// `None` for a summand type of a stationary template.
    pub level: Option<usize>,
    pub summand: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub multiplicity: usize,
}

/// Bratteli multigraph: per summand, or per summand type for stationary input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SummandGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

impl SummandGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|e| e.multiplicity).sum()
    }

    /// Number of weakly connected components.
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            if a != b {
                parent[a] = b;
            }
        }
        (0..self.nodes.len()).filter(|&x| find(&mut parent, x) == x).count()
    }
}

pub fn summand_graph(p: &TafPresentation) -> SummandGraph {
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let nodes: Vec<GraphNode>;
    if let Some(t) = p.stationary() {
        let types = p.summand_count(t.from_level);
        nodes = (0..types).map(|s| GraphNode { level: None, summand: s }).collect();
        for a in &t.arms {
            *counts.entry((a.source, a.target)).or_default() += 1;
        }
    } else {
        let mut offsets = Vec::with_capacity(p.depth());
        let mut all = Vec::new();
        for level in 1..=p.depth() {
            offsets.push(all.len());
            all.extend((0..p.summand_count(level)).map(|s| GraphNode { level: Some(level), summand: s }));
        }
        for a in p.arms() {
            let from = offsets[a.level - 1] + a.source;
            let to = offsets[a.level] + a.target;
            *counts.entry((from, to)).or_default() += 1;
        }
        nodes = all;
    }
    let edges = counts.into_iter().map(|((from, to), multiplicity)| GraphEdge { from, to, multiplicity }).collect();
    SummandGraph { nodes, edges }
}
