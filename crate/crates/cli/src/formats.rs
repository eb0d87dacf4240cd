//! JSON file formats for presentations, ideals, chains and envelope exports.

use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use taf_core::envelope::EnvelopeDiagram;
use taf_core::ideal::LevelUnits;
use taf_core::{
    generate_ideal, EmbeddingArm, IdealTable, KeptStatus, Layout, MatrixUnit, MiChain, StationaryTemplate, TafError,
    TafPresentation, TemplateArm,
};

/// Input failure: unreadable file, schema violation or semantic rejection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub path: String,
    /// `line:column` for schema violations.
    pub location: Option<String>,
    pub message: String,
}

impl InputError {
    pub fn semantic(path: &Path, err: TafError) -> Self {
        Self { path: path.display().to_string(), location: None, message: err.to_string() }
    }
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.location {
            Some(loc) => write!(f, "{}:{loc}: {}", self.path, self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError {
        path: path.display().to_string(),
        location: None,
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| InputError {
        path: path.display().to_string(),
        location: Some(format!("{}:{}", e.line(), e.column())),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateFile {
    pub arms: Vec<TemplateArm>,
    #[serde(default)]
    pub layout: Layout,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryFile {
    pub from_level: usize,
    pub template: TemplateFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationFile {
    pub levels: Vec<Vec<usize>>,
    #[serde(default)]
    pub arms: Vec<EmbeddingArm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationary: Option<StationaryFile>,
    /// Unroll the stationary template up to this many levels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

impl PresentationFile {
    pub fn to_presentation(&self) -> Result<TafPresentation, TafError> {
        let stationary = self.stationary.as_ref().map(|s| StationaryTemplate {
            from_level: s.from_level,
            arms: s.template.arms.clone(),
            layout: s.template.layout,
        });
        let p = TafPresentation::new(self.levels.clone(), self.arms.clone(), stationary)?;
        match self.depth {
            Some(d) if d > p.depth() => p.extend_stationary(d - p.depth()),
            Some(d) if d < p.depth() => p.prefix(d),
            _ => Ok(p),
        }
    }

    pub fn from_presentation(p: &TafPresentation) -> Self {
        Self {
            levels: p.levels().to_vec(),
            arms: p.arms().to_vec(),
            stationary: p.stationary().map(|t| StationaryFile {
                from_level: t.from_level,
                template: TemplateFile { arms: t.arms.clone(), layout: t.layout },
            }),
            depth: None,
        }
    }
}

pub fn read_presentation(path: &Path) -> Result<TafPresentation, InputError> {
    let file: PresentationFile = read_json(path)?;
    file.to_presentation().map_err(|e| InputError::semantic(path, e))
}

/// Either generators or a full per-level table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IdealFile {
    Generators { generators: Vec<MatrixUnit> },
    Table { depth: usize, levels: Vec<LevelUnits> },
}

impl IdealFile {
    pub fn from_table(t: &IdealTable) -> Self {
        IdealFile::Table { depth: t.depth(), levels: t.export() }
    }

    /// The ideal through `depth`; tables are truncated, never extended.
    pub fn to_table(&self, p: &TafPresentation, depth: usize) -> Result<IdealTable, TafError> {
        match self {
            IdealFile::Generators { generators } => generate_ideal(p, generators, depth),
            IdealFile::Table { depth: d, levels } => {
                if levels.len() != *d {
                    return Err(TafError::InvalidTable(format!("depth {d} but {} levels listed", levels.len())));
                }
                if let Some((i, l)) = levels.iter().enumerate().find(|(i, l)| l.level != i + 1) {
                    return Err(TafError::InvalidTable(format!("entry {i} is level {}, expected {}", l.level, i + 1)));
                }
                let sets: Vec<Vec<Vec<(usize, usize)>>> = levels.iter().map(|l| l.summands.clone()).collect();
                let table = IdealTable::from_level_sets(p, &sets)?;
                if depth > table.depth() {
                    return Err(TafError::PathTooLong { requested: depth, available: table.depth() });
                }
                Ok(table.truncated(depth))
            }
        }
    }
}

pub fn read_ideal(path: &Path, p: &TafPresentation, depth: usize) -> Result<IdealTable, InputError> {
    let file: IdealFile = read_json(path)?;
    file.to_table(p, depth).map_err(|e| InputError::semantic(path, e))
}

pub fn read_chain(path: &Path) -> Result<MiChain, InputError> {
    read_json(path)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeAnnotation {
    pub summand: usize,
    pub a: usize,
    pub b: usize,
    pub maximal: bool,
    pub kept: KeptStatus,
}

/// An envelope in the presentation layout, with node provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvelopeFile {
    /// Node sizes per level.
    pub levels: Vec<Vec<usize>>,
    /// Arms between nodes; `source` and `target` are node indices.
    pub arms: Vec<EmbeddingArm>,
    pub nodes: Vec<Vec<NodeAnnotation>>,
    pub horizon: usize,
    pub terminal: bool,
}

impl EnvelopeFile {
    pub fn from_envelope(env: &EnvelopeDiagram) -> Self {
        let nodes: Vec<Vec<NodeAnnotation>> = (1..=env.depth())
            .map(|l| {
                env.nodes(l)
                    .iter()
                    .map(|n| NodeAnnotation {
                        summand: n.projection.summand,
                        a: n.projection.a,
                        b: n.projection.b,
                        maximal: n.maximal,
                        kept: n.kept,
                    })
                    .collect()
            })
            .collect();
        let levels = nodes.iter().map(|l| l.iter().map(|n| n.b - n.a + 1).collect()).collect();
        let arms = (1..env.depth())
            .flat_map(|l| {
                env.arms(l).iter().map(move |a| EmbeddingArm {
                    level: l,
                    source: a.source,
                    target: a.target,
                    injection: a.injection.clone(),
                })
            })
            .collect();
        Self { levels, arms, nodes, horizon: env.horizon(), terminal: env.is_terminal() }
    }
}
