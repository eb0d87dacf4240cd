//! Meet-irreducibility of an ideal, through its envelope or by brute force.

use serde::Serialize;

use crate::diagram::{MatrixUnit, TafPresentation};
use crate::envelope::{build_envelope, EnvelopeDiagram, NodeRef};
use crate::error::{Result, TafError};
use crate::ideal::{contains, generate_ideal, intersect, join, IdealTable};
use crate::oracle::{enumerate_ideals_two_level, is_meet_irreducible_bruteforce, OracleBounds};
use crate::primitivity::{analyze_envelope, PrimenessStatus, PrimenessVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MiMethod {
    #[default]
    Envelope,
    Bruteforce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MiAnswer {
    Yes,
    No,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiReport {
    pub answer: MiAnswer,
    /// `J` is the whole algebra (never counted as meet irreducible).
    pub improper: bool,
    /// Ideals properly containing `J` that meet in `J`, when the answer is no.
    pub witness: Option<(IdealTable, IdealTable)>,
    pub verdict: Option<PrimenessVerdict<NodeRef>>,
    pub note: String,
}

impl MiReport {
    fn plain(answer: MiAnswer, improper: bool, note: impl Into<String>) -> Self {
        Self { answer, improper, witness: None, verdict: None, note: note.into() }
    }
}

/// `J` joined with the ideal of the node's top-right corner unit.
fn corner_ideal(p: &TafPresentation, j: &IdealTable, env: &EnvelopeDiagram, node: NodeRef) -> Result<IdealTable> {
    let q = env.node(node).projection;
    let corner = generate_ideal(p, &[MatrixUnit::new(q.level, q.summand, q.a, q.b)], env.depth())?;
    join(p, j, &corner, env.depth())
}

pub fn is_meet_irreducible(
    p: &TafPresentation,
    j: &IdealTable,
    method: MiMethod,
    depth: usize,
    horizon: usize,
) -> Result<MiReport> {
    j.check_presentation(p)?;
    let j = j.truncated(depth.min(j.depth()));
    if j.is_whole() {
        return Ok(MiReport::plain(MiAnswer::No, true, "the whole algebra is not a proper ideal"));
    }
    match method {
        MiMethod::Envelope => by_envelope(p, &j, depth, horizon),
        MiMethod::Bruteforce => by_lattice(p, &j),
    }
}

fn by_envelope(p: &TafPresentation, j: &IdealTable, depth: usize, horizon: usize) -> Result<MiReport> {
    let env = build_envelope(p, j, depth, horizon)?;
    let verdict = analyze_envelope(&env)?;
    let mut report = match verdict.status {
        PrimenessStatus::Primitive => MiReport::plain(MiAnswer::Yes, false, "envelope is primitive"),
        PrimenessStatus::InconclusiveAtHorizon => {
            MiReport::plain(MiAnswer::Inconclusive, false, "envelope primeness undecided at this horizon")
        }
        PrimenessStatus::NotPrime => match verdict.counterexample {
            Some((s, t)) => {
                let a = corner_ideal(p, j, &env, s)?;
                let b = corner_ideal(p, j, &env, t)?;
                let meet = intersect(&a, &b)?;
                let proper = !contains(j, &a)? && !contains(j, &b)?;
                if proper && meet == *j {
                    MiReport {
                        witness: Some((a, b)),
                        ..MiReport::plain(MiAnswer::No, false, "corner ideals of a disjoint node pair meet in J")
                    }
                } else {
                    MiReport::plain(
                        MiAnswer::Inconclusive,
                        false,
                        "corner ideals of the disjoint pair do not meet in J",
                    )
                }
            }
            None => MiReport::plain(MiAnswer::No, false, "envelope has no kept nodes"),
        },
    };
    report.verdict = Some(verdict);
    Ok(report)
}

fn by_lattice(p: &TafPresentation, j: &IdealTable) -> Result<MiReport> {
    if p.stationary().is_some() {
        return Err(TafError::OracleTooLarge("stationary presentations have infinitely many levels".into()));
    }
    if j.depth() != p.depth() {
        return Err(TafError::LevelOutOfRange { level: j.depth(), depth: p.depth() });
    }
    let lattice = enumerate_ideals_two_level(p, &OracleBounds::from_env())?;
    let idx = lattice.find_table(j).ok_or_else(|| TafError::InvalidTable("not an ideal of the presentation".into()))?;
    let v = is_meet_irreducible_bruteforce(&lattice, idx);
    if v.irreducible {
        return Ok(MiReport::plain(MiAnswer::Yes, false, "no pair of larger ideals meets in J"));
    }
    let (a, b) = v.witness.expect("reducible verdicts carry a witness");
    Ok(MiReport {
        witness: Some((lattice.to_table(p, a)?, lattice.to_table(p, b)?)),
        ..MiReport::plain(MiAnswer::No, false, "two larger ideals meet in J")
    })
}
