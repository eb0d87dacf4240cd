//! Command-line front end: parse presentation, ideal and chain files, run one
//! operation and emit a JSON (or plain text) report.

pub mod formats;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use taf_core::nest::KernelStatus;
use taf_core::oracle::{
    verify_envelope_theorem, verify_envelope_theorem_two_level, verify_wedge_theorem, OracleBounds,
};
use taf_core::{
    analyze_envelope, build_envelope, build_state_chain, characteristic_matrix_units, check_nest, contains,
    find_essential_path, finite_gns_stage, ideal_from_mi_chain, intersect, is_meet_irreducible, is_mi_chain, join,
    kernel_check, validate_presentation, EnvelopeDiagram, IdealTable, MatrixUnit, MiAnswer, MiMethod, NodeRef,
    PrimenessStatus, PrimenessVerdict, SubordinateRule, TafError, TafPresentation,
};

use formats::{read_chain, read_ideal, read_presentation, EnvelopeFile, IdealFile, InputError};

pub mod exit {
    pub const SUCCESS: u8 = 0;
    /// Negative verdict, reported with a witness.
    pub const NEGATIVE: u8 = 1;
    pub const INCONCLUSIVE: u8 = 2;
    pub const INPUT_ERROR: u8 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Method {
    #[default]
    Envelope,
    Bruteforce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdealOp {
    Meet,
    Join,
    Contains,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Rule {
    #[default]
    Leftmost,
    Rightmost,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "taf", version, about = "Ideals, envelopes and nest representations of TAF algebras")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Truncation depth D (defaults to the presentation's depth).
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Look-ahead horizon h for stationary presentations.
    #[arg(long, global = true, default_value_t = 2)]
    pub horizon: usize,
    #[arg(long, global = true, value_enum, default_value_t)]
    pub method: Method,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the cover, monotonicity and template invariants.
    Validate {
        presentation: PathBuf,
    },
    /// Generate an ideal table from a generator (or table) file.
    IdealGen {
        presentation: PathBuf,
        ideal: PathBuf,
    },
    IdealOp {
        #[arg(value_enum)]
        op: IdealOp,
        presentation: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
    /// Export the envelope of A/J (J = 0 when omitted).
    Envelope {
        presentation: PathBuf,
        ideal: Option<PathBuf>,
    },
    PrimeCheck {
        presentation: PathBuf,
        ideal: Option<PathBuf>,
    },
    MiCheck {
        presentation: PathBuf,
        ideal: PathBuf,
    },
    ChainCheck {
        presentation: PathBuf,
        chain: PathBuf,
    },
    ChainToIdeal {
        presentation: PathBuf,
        chain: PathBuf,
    },
    IdealToChain {
        presentation: PathBuf,
        ideal: Option<PathBuf>,
    },
    /// One finite stage of the nest representation along an essential path.
    RepStage {
        presentation: PathBuf,
        ideal: Option<PathBuf>,
        /// Stage level (defaults to the top of the path).
        #[arg(long)]
        stage: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        rule: Rule,
    },
    /// Brute-force wedge classification on T_n.
    OracleWedge {
        #[arg(long)]
        n: usize,
    },
    /// Envelope criterion against brute force, on T_n or a two-level presentation.
    OracleEnvelope {
        #[arg(long, required_unless_present = "presentation")]
        n: Option<usize>,
        #[arg(long, conflicts_with = "n")]
        presentation: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::IdealGen { .. } => "ideal-gen",
            Command::IdealOp { .. } => "ideal-op",
            Command::Envelope { .. } => "envelope",
            Command::PrimeCheck { .. } => "prime-check",
            Command::MiCheck { .. } => "mi-check",
            Command::ChainCheck { .. } => "chain-check",
            Command::ChainToIdeal { .. } => "chain-to-ideal",
            Command::IdealToChain { .. } => "ideal-to-chain",
            Command::RepStage { .. } => "rep-stage",
            Command::OracleWedge { .. } => "oracle-wedge",
            Command::OracleEnvelope { .. } => "oracle-envelope",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub code: u8,
    pub report: Value,
}

enum Failure {
    Input(InputError),
    Core(TafError),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<TafError> for Failure {
    fn from(e: TafError) -> Self {
        Failure::Core(e)
    }
}

type Step = Result<(u8, Value), Failure>;

pub fn run(config: &RunConfig) -> RunOutput {
    let name = config.command.name();
    let (code, mut report) = match dispatch(config) {
        Ok(r) => r,
        Err(Failure::Input(e)) => {
            (exit::INPUT_ERROR, json!({ "error": { "path": e.path, "location": e.location, "message": e.message } }))
        }
        Err(Failure::Core(e)) => (exit::INPUT_ERROR, json!({ "error": { "message": e.to_string() } })),
    };
    if let Value::Object(map) = &mut report {
        map.insert("command".into(), json!(name));
        map.insert("exit_code".into(), json!(code));
    }
    RunOutput { code, report }
}

/// Serializes a report; text output lists top-level fields one per line.
pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes"),
        Format::Text => match report {
            Value::Object(map) => map
                .iter()
                .map(|(k, v)| match v {
                    Value::String(s) => format!("{k}: {s}"),
                    other => format!("{k}: {other}"),
                })
                .collect::<Vec<_>>()
                .join("\n"),
            other => other.to_string(),
        },
    }
}

struct Context {
    p: TafPresentation,
    depth: usize,
    horizon: usize,
}

fn context(config: &RunConfig, presentation: &Path) -> Result<Context, Failure> {
    let p = read_presentation(presentation)?;
    let depth = config.depth.unwrap_or(p.depth());
    p.check_level(depth)?;
    if config.horizon == 0 {
        return Err(TafError::InvalidHorizon(0).into());
    }
    Ok(Context { p, depth, horizon: config.horizon })
}

impl Context {
    fn ideal(&self, path: Option<&PathBuf>) -> Result<IdealTable, Failure> {
        Ok(match path {
            Some(path) => read_ideal(path, &self.p, self.depth)?,
            None => IdealTable::zero(&self.p, self.depth)?,
        })
    }

    fn envelope(&self, j: &IdealTable) -> Result<EnvelopeDiagram, Failure> {
        Ok(build_envelope(&self.p, j, self.depth, self.horizon)?)
    }
}

fn node_json(env: &EnvelopeDiagram, r: NodeRef) -> Value {
    let q = env.node(r).projection;
    json!({ "level": r.level, "index": r.index, "summand": q.summand, "a": q.a, "b": q.b })
}

fn verdict_json(env: &EnvelopeDiagram, v: &PrimenessVerdict<NodeRef>) -> Value {
    json!({
        "status": v.status,
        "exact": v.exact,
        "window": v.window,
        "counterexample": v.counterexample.map(|(s, t)| vec![node_json(env, s), node_json(env, t)]),
        "witness_path": v.witness.as_ref().map(|w| w.iter().map(|&n| node_json(env, n)).collect::<Vec<_>>()),
    })
}

fn verdict_code(status: PrimenessStatus) -> u8 {
    match status {
        PrimenessStatus::Primitive => exit::SUCCESS,
        PrimenessStatus::NotPrime => exit::NEGATIVE,
        PrimenessStatus::InconclusiveAtHorizon => exit::INCONCLUSIVE,
    }
}

fn dispatch(config: &RunConfig) -> Step {
    match &config.command {
        Command::Validate { presentation } => {
            let cx = context(config, presentation)?;
            let report = validate_presentation(&cx.p);
            let violations: Vec<Value> =
                report.violations.iter().map(|v| json!({ "detail": v.to_string(), "violation": v })).collect();
            let code = if report.is_valid() { exit::SUCCESS } else { exit::NEGATIVE };
            Ok((code, json!({ "valid": report.is_valid(), "violations": violations, "depth": cx.p.depth() })))
        }
        Command::IdealGen { presentation, ideal } => {
            let cx = context(config, presentation)?;
            let j = cx.ideal(Some(ideal))?;
            Ok((exit::SUCCESS, json!({ "ideal": IdealFile::from_table(&j), "unit_count": j.unit_count() })))
        }
        Command::IdealOp { op, presentation, a, b } => {
            let cx = context(config, presentation)?;
            let (ja, jb) = (cx.ideal(Some(a))?, cx.ideal(Some(b))?);
            match op {
                IdealOp::Meet => Ok((exit::SUCCESS, json!({ "ideal": IdealFile::from_table(&intersect(&ja, &jb)?) }))),
                IdealOp::Join => {
                    let j = join(&cx.p, &ja, &jb, cx.depth)?;
                    Ok((exit::SUCCESS, json!({ "ideal": IdealFile::from_table(&j) })))
                }
                IdealOp::Contains => {
                    if contains(&ja, &jb)? {
                        return Ok((exit::SUCCESS, json!({ "contains": true })));
                    }
                    let missing = (1..=cx.depth)
                        .flat_map(|l| jb.units_at(l))
                        .find(|u| !ja.contains_unit(u))
                        .expect("a unit of b outside a");
                    Ok((exit::NEGATIVE, json!({ "contains": false, "witness": missing })))
                }
            }
        }
        Command::Envelope { presentation, ideal } => {
            let cx = context(config, presentation)?;
            let env = cx.envelope(&cx.ideal(ideal.as_ref())?)?;
            let kept: Vec<usize> = (1..=env.depth()).map(|l| env.kept_nodes(l).len()).collect();
            Ok((exit::SUCCESS, json!({ "envelope": EnvelopeFile::from_envelope(&env), "kept_per_level": kept })))
        }
        Command::PrimeCheck { presentation, ideal } => {
            let cx = context(config, presentation)?;
            let env = cx.envelope(&cx.ideal(ideal.as_ref())?)?;
            let v = analyze_envelope(&env)?;
            Ok((verdict_code(v.status), json!({ "verdict": verdict_json(&env, &v) })))
        }
        Command::MiCheck { presentation, ideal } => {
            let cx = context(config, presentation)?;
            let j = cx.ideal(Some(ideal))?;
            let method = match config.method {
                Method::Envelope => MiMethod::Envelope,
                Method::Bruteforce => MiMethod::Bruteforce,
            };
            let r = is_meet_irreducible(&cx.p, &j, method, cx.depth, cx.horizon)?;
            let code = match r.answer {
                MiAnswer::Yes => exit::SUCCESS,
                MiAnswer::No => exit::NEGATIVE,
                MiAnswer::Inconclusive => exit::INCONCLUSIVE,
            };
            let witness = r.witness.as_ref().map(|(a, b)| vec![IdealFile::from_table(a), IdealFile::from_table(b)]);
            Ok((
                code,
                json!({
                    "answer": r.answer,
                    "method": method,
                    "improper": r.improper,
                    "note": r.note,
                    "witness": witness,
                    "envelope_status": r.verdict.as_ref().map(|v| v.status),
                }),
            ))
        }
        Command::ChainCheck { presentation, chain } => {
            let cx = context(config, presentation)?;
            let check = is_mi_chain(&cx.p, &read_chain(chain)?);
            let code = if check.valid { exit::SUCCESS } else { exit::NEGATIVE };
            let detail = check.violation.as_ref().map(ToString::to_string);
            Ok((code, json!({ "valid": check.valid, "violation": check.violation, "detail": detail })))
        }
        Command::ChainToIdeal { presentation, chain } => {
            let cx = context(config, presentation)?;
            let r = ideal_from_mi_chain(&cx.p, &read_chain(chain)?, cx.depth, cx.horizon)?;
            Ok((
                exit::SUCCESS,
                json!({
                    "ideal": IdealFile::from_table(&r.table),
                    "exact": r.exact,
                    "decided_at": r.decided_at,
                    "trusted_through": r.trusted_through,
                }),
            ))
        }
        Command::IdealToChain { presentation, ideal } => {
            let cx = context(config, presentation)?;
            let env = cx.envelope(&cx.ideal(ideal.as_ref())?)?;
            let v = analyze_envelope(&env)?;
            if !v.is_primitive() {
                return Ok((verdict_code(v.status), json!({ "verdict": verdict_json(&env, &v) })));
            }
            let path = find_essential_path(&env, 1)?;
            let chain = characteristic_matrix_units(&path.nodes, &env, &cx.p)?;
            Ok((exit::SUCCESS, json!({ "chain": chain, "analyzed_through": path.analyzed_through })))
        }
        Command::RepStage { presentation, ideal, stage, rule } => {
            let cx = context(config, presentation)?;
            let j = cx.ideal(ideal.as_ref())?;
            let env = cx.envelope(&j)?;
            let v = analyze_envelope(&env)?;
            if !v.is_primitive() {
                return Ok((verdict_code(v.status), json!({ "verdict": verdict_json(&env, &v) })));
            }
            let path = find_essential_path(&env, 1)?;
            let rule = match rule {
                Rule::Leftmost => SubordinateRule::Leftmost,
                Rule::Rightmost => SubordinateRule::Rightmost,
            };
            let chain = build_state_chain(&env, &path.nodes, rule)?;
            let d = stage.unwrap_or(chain.top_level());
            let units: Vec<MatrixUnit> =
                (1..=d.min(cx.depth)).flat_map(|l| cx.p.units_at(l).collect::<Vec<_>>()).collect();
            let st = finite_gns_stage::<i64>(&cx.p, &j, &env, &chain, d, &units)?;
            let nest = check_nest(&st);
            let entries = kernel_check(&cx.p, &j, &env, &chain, &units, d)?;
            let pick = |want: fn(&KernelStatus) -> bool| -> Vec<MatrixUnit> {
                entries.iter().filter(|e| want(&e.status)).map(|e| e.unit).collect()
            };
            let violations = pick(|s| matches!(s, KernelStatus::Violation(_)));
            let undecided = pick(|s| matches!(s, KernelStatus::Inconclusive));
            let vanishing = entries.iter().filter(|e| matches!(e.status, KernelStatus::Vanishes(_))).count();
            let code = if !violations.is_empty() {
                exit::NEGATIVE
            } else if !undecided.is_empty() {
                exit::INCONCLUSIVE
            } else {
                exit::SUCCESS
            };
            Ok((
                code,
                json!({
                    "stage": d,
                    "node": node_json(&env, st.node),
                    "dim": st.dim,
                    "position": st.position,
                    "state_positions": chain.positions,
                    "nest": nest,
                    "kernel": {
                        "units": entries.len(),
                        "vanishing": vanishing,
                        "nonzero": entries.len() - vanishing - violations.len() - undecided.len(),
                        "violations": violations,
                        "undecided": undecided,
                    },
                }),
            ))
        }
        Command::OracleWedge { n } => {
            let r = verify_wedge_theorem(*n, &OracleBounds::from_env())?;
            Ok((if r.passed { exit::SUCCESS } else { exit::NEGATIVE }, json!({ "report": r })))
        }
        Command::OracleEnvelope { n, presentation } => {
            let bounds = OracleBounds::from_env();
            let r = match (n, presentation) {
                (Some(n), _) => verify_envelope_theorem(*n, &bounds)?,
                (None, Some(path)) => verify_envelope_theorem_two_level(&read_presentation(path)?, &bounds)?,
                (None, None) => unreachable!("clap requires one of n and presentation"),
            };
            Ok((if r.passed { exit::SUCCESS } else { exit::NEGATIVE }, json!({ "report": r })))
        }
    }
}
