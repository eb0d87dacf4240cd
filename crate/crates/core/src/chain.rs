//! mi-chains: verification, the induced ideal and the round trip.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{MatrixUnit, TafPresentation};
use crate::envelope::build_envelope;
use crate::error::{Result, TafError};
use crate::ideal::{pull_sets, ClosedSet, IdealTable};
use crate::primitivity::{analyze_envelope, characteristic_matrix_units, find_essential_path};

/// One matrix unit per level from `start_level` on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiChain {
    pub start_level: usize,
    pub units: Vec<MatrixUnit>,
}

impl MiChain {
    /// Level of the last unit.
    pub fn top_level(&self) -> usize {
        self.start_level + self.units.len() - 1
    }

    pub fn unit_at(&self, level: usize) -> Option<&MatrixUnit> {
        level.checked_sub(self.start_level).and_then(|i| self.units.get(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainCondition {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainViolation {
    pub condition: ChainCondition,
    pub level: usize,
    pub detail: String,
}

impl fmt::Display for ChainViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition ({:?}) fails at level {}: {}", self.condition, self.level, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainCheck {
    pub valid: bool,
    pub violation: Option<ChainViolation>,
}

/// Whether `inner` lies in the ideal of its level generated by the images of `outer`.
fn generated_by_push(p: &TafPresentation, outer: &MatrixUnit, inner: &MatrixUnit) -> Result<bool> {
    Ok(p.push_matrix_unit(outer)?
        .iter()
        .any(|img| img.summand == inner.summand && inner.row <= img.row && inner.col >= img.col))
}

pub fn is_mi_chain(p: &TafPresentation, chain: &MiChain) -> ChainCheck {
    let fail = |condition, level, detail: String| ChainCheck {
        valid: false,
        violation: Some(ChainViolation { condition, level, detail }),
    };
    if chain.units.is_empty() {
        return fail(ChainCondition::A, chain.start_level, "empty chain".into());
    }
    for (i, u) in chain.units.iter().enumerate() {
        let level = chain.start_level + i;
        if u.level != level {
            return fail(ChainCondition::A, level, format!("{u} is not a unit of level {level}"));
        }
        if let Err(e) = p.check_unit(u) {
            return fail(ChainCondition::A, level, e.to_string());
        }
    }
    for w in chain.units.windows(2) {
        match generated_by_push(p, &w[0], &w[1]) {
            Ok(true) => {}
            Ok(false) => {
                return fail(
                    ChainCondition::B,
                    w[1].level,
                    format!("{} is not in the ideal generated by {}", w[1], w[0]),
                );
            }
            Err(e) => return fail(ChainCondition::B, w[1].level, e.to_string()),
        }
    }
    ChainCheck { valid: true, violation: None }
}

/// The largest ideal avoiding a chain, computed through `depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainIdeal {
    pub table: IdealTable,
    /// Chain level used for the avoidance test.
    pub decided_at: usize,
    /// True when `decided_at` is the end of a non-stationary presentation.
    pub exact: bool,
    /// Levels through which the table is trusted.
    pub trusted_through: usize,
}

/// Join of all ideals containing no chain unit.
///
/// `u` avoids the chain iff no image of `u` at the decision level lies inside the
/// interval of that level's chain unit; by condition (B) this only needs the last
/// chain level in range. The table is the backward pull of that level's set.
pub fn ideal_from_mi_chain(p: &TafPresentation, chain: &MiChain, depth: usize, horizon: usize) -> Result<ChainIdeal> {
    if let Some(v) = is_mi_chain(p, chain).violation {
        return Err(TafError::ChainConsistency(v.to_string()));
    }
    p.check_level(depth)?;
    let top = chain.top_level().min(p.depth()).min(depth + horizon);
    if top < depth || top < chain.start_level {
        return Err(TafError::PathTooLong { requested: depth, available: top });
    }
    let e = chain.unit_at(top).expect("top within chain");
    let mut levels = vec![Vec::new(); top];
    levels[top - 1] = p
        .level_sizes(top)
        .iter()
        .enumerate()
        .map(|(s, &n)| {
            if s != e.summand {
                return ClosedSet::full(n);
            }
            // (k, l) avoids [a, b] iff k < a or l > b
            let thresholds = (1..=n).map(|k| if k < e.row { k } else { (e.col + 1).max(k) }).collect();
            ClosedSet::from_thresholds(n, thresholds).expect("wedge thresholds")
        })
        .collect();
    for level in (1..top).rev() {
        levels[level - 1] = pull_sets(p, level, &levels[level]);
    }
    levels.truncate(depth);
    let exact = p.stationary().is_none() && top == p.depth();
    let trusted_through = if exact { depth } else { depth.saturating_sub(horizon) };
    let mut table = IdealTable::from_raw(p, levels);
    table.mark_saturated();
    Ok(ChainIdeal { table, decided_at: top, exact, trusted_through })
}

/// Characteristic chain of a meet-irreducible ideal, through its envelope's essential path.
pub fn mi_chain_from_ideal(p: &TafPresentation, j: &IdealTable, depth: usize, horizon: usize) -> Result<MiChain> {
    let env = build_envelope(p, j, depth, horizon)?;
    let verdict = analyze_envelope(&env)?;
    if !verdict.is_primitive() {
        return Err(TafError::NotPrimitive(format!("envelope verdict {:?}", verdict.status)));
    }
    let path = find_essential_path(&env, 1)?;
    characteristic_matrix_units(&path.nodes, &env, p)
}
