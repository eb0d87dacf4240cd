use std::fs;
use std::path::PathBuf;
use std::process::Command as Process;

use clap::Parser;
use serde_json::Value;
use taf_cli::formats::{read_chain, read_ideal, read_presentation, EnvelopeFile, IdealFile, PresentationFile};
use taf_cli::{exit, render, run, Format, RunConfig, RunOutput};
use taf_core::{fixtures, generate_ideal, MatrixUnit};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn taf(args: &[&str]) -> RunOutput {
    let config =
        RunConfig::try_parse_from(std::iter::once("taf").chain(args.iter().copied())).expect("arguments parse");
    run(&config)
}

#[test]
fn wedge_is_meet_irreducible() {
    for method in ["envelope", "bruteforce"] {
        let out = taf(&["mi-check", &data("t3.json"), &data("t3_wedge_1_2.json"), "--method", method]);
        assert_eq!(out.code, exit::SUCCESS, "{}", out.report);
        assert_eq!(out.report["answer"], "yes");
    }
}

#[test]
fn t2_corner_ideal_is_reducible_with_witness() {
    for method in ["envelope", "bruteforce"] {
        let out = taf(&["mi-check", &data("t2.json"), &data("t2_j12.json"), "--method", method]);
        assert_eq!(out.code, exit::NEGATIVE);
        assert_eq!(out.report["answer"], "no");
        let pair = out.report["witness"].as_array().unwrap();
        assert_eq!(pair.len(), 2);
        let p = fixtures::tn(2);
        let tables: Vec<_> = pair
            .iter()
            .map(|w| serde_json::from_value::<IdealFile>(w.clone()).unwrap().to_table(&p, 1).unwrap())
            .collect();
        let j = generate_ideal(&p, &[MatrixUnit::new(1, 0, 1, 2)], 1).unwrap();
        assert_eq!(taf_core::intersect(&tables[0], &tables[1]).unwrap(), j);
    }
}

#[test]
fn swap_is_not_prime() {
    let out = taf(&["prime-check", &data("swap.json"), "--horizon", "2"]);
    assert_eq!(out.code, exit::NEGATIVE);
    let verdict = &out.report["verdict"];
    assert_eq!(verdict["status"], "not-prime");
    assert_eq!(verdict["counterexample"].as_array().unwrap().len(), 2);
    let out = taf(&["prime-check", &data("ref2.json")]);
    assert_eq!(out.code, exit::SUCCESS);
}

#[test]
fn schema_errors_exit_with_input_error() {
    for (file, located) in [
        ("bad_schema.json", true),
        ("unknown_field.json", true),
        ("truncated.json", true),
        ("bad_position.json", false),
        ("missing.json", false),
    ] {
        let out = taf(&["validate", &data(file)]);
        assert_eq!(out.code, exit::INPUT_ERROR, "{file}");
        assert_eq!(out.report["error"]["location"].is_string(), located, "{file}: {}", out.report);
    }
    let out = taf(&["validate", &data("t2.json"), "--depth", "5"]);
    assert_eq!(out.code, exit::INPUT_ERROR);
    let out = taf(&["prime-check", &data("ref2.json"), "--horizon", "0"]);
    assert_eq!(out.code, exit::INPUT_ERROR);
    let out = taf(&["mi-check", &data("swap.json"), &data("t2_j12.json"), "--method", "bruteforce"]);
    assert_eq!(out.code, exit::INPUT_ERROR);
}

#[test]
fn validation_reports_violations() {
    let out = taf(&["validate", &data("two_level.json")]);
    assert_eq!(out.code, exit::SUCCESS);
    let out = taf(&["validate", &data("overlap.json")]);
    assert_eq!(out.code, exit::NEGATIVE);
    let kinds: Vec<&str> =
        out.report["violations"].as_array().unwrap().iter().map(|v| v["violation"]["kind"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"overlap") && kinds.contains(&"gap"), "{kinds:?}");
}

#[test]
fn presentation_export_reparses() {
    let p = read_presentation(PathBuf::from(data("swap.json")).as_path()).unwrap();
    assert_eq!(p, fixtures::swap(6));
    let text = serde_json::to_string(&PresentationFile::from_presentation(&p)).unwrap();
    let back: PresentationFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_presentation().unwrap(), p);
}

#[test]
fn ideal_and_envelope_exports_reparse() {
    let dir = tempfile::tempdir().unwrap();
    let gen = taf(&["ideal-gen", &data("ref2.json"), &data("t2_j12.json"), "--depth", "4"]);
    assert_eq!(gen.code, exit::SUCCESS);
    let path = dir.path().join("ideal.json");
    fs::write(&path, serde_json::to_string(&gen.report["ideal"]).unwrap()).unwrap();
    let p = fixtures::ref2(6);
    let table = read_ideal(&path, &p, 4).unwrap();
    assert_eq!(table, generate_ideal(&p, &[MatrixUnit::new(1, 0, 1, 2)], 4).unwrap());
    let again = taf(&["ideal-gen", &data("ref2.json"), path.to_str().unwrap(), "--depth", "4"]);
    assert_eq!(again.report["ideal"], gen.report["ideal"]);

    let env = taf(&["envelope", &data("ref2.json"), path.to_str().unwrap(), "--depth", "4"]);
    assert_eq!(env.code, exit::SUCCESS);
    let file: EnvelopeFile = serde_json::from_value(env.report["envelope"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&file).unwrap(), env.report["envelope"]);
    assert_eq!(file.levels.len(), 4);
}

#[test]
fn ideal_operations() {
    let (t3, wedge, corner) = (data("t3.json"), data("t3_wedge_1_2.json"), data("t3_e13.json"));
    let meet = taf(&["ideal-op", "meet", &t3, &wedge, &corner]);
    assert_eq!(meet.code, exit::SUCCESS);
    let join = taf(&["ideal-op", "join", &t3, &wedge, &corner]);
    assert_eq!(join.code, exit::SUCCESS);
    let yes = taf(&["ideal-op", "contains", &t3, &wedge, &corner]);
    assert_eq!(yes.code, exit::SUCCESS, "{}", yes.report);
    let no = taf(&["ideal-op", "contains", &t3, &corner, &wedge]);
    assert_eq!(no.code, exit::NEGATIVE);
    assert_eq!(no.report["witness"]["row"], 2);
}

#[test]
fn chain_commands_round_trip() {
    let ok = taf(&["chain-check", &data("ref2.json"), &data("ref2_corners.json")]);
    assert_eq!(ok.code, exit::SUCCESS);
    let bad = taf(&["chain-check", &data("ref2.json"), &data("bad_chain.json")]);
    assert_eq!(bad.code, exit::NEGATIVE);
    assert_eq!(bad.report["violation"]["condition"], "A");

    let out = taf(&["ideal-to-chain", &data("ref2.json"), "--horizon", "3"]);
    assert_eq!(out.code, exit::SUCCESS, "{}", out.report);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.json");
    fs::write(&path, serde_json::to_string(&out.report["chain"]).unwrap()).unwrap();
    assert_eq!(read_chain(&path).unwrap().units.len(), 6);
    let back = taf(&["chain-to-ideal", &data("ref2.json"), path.to_str().unwrap(), "--horizon", "3"]);
    assert_eq!(back.code, exit::SUCCESS);
    assert_eq!(back.report["trusted_through"], 3);
    let table: IdealFile = serde_json::from_value(back.report["ideal"].clone()).unwrap();
    let table = table.to_table(&fixtures::ref2(6), 6).unwrap();
    assert!((1..=3).all(|l| table.units_at(l).is_empty()));
}

#[test]
fn rep_stage_on_ref2() {
    let out = taf(&["rep-stage", &data("ref2.json"), "--depth", "5", "--stage", "4"]);
    assert_eq!(out.code, exit::SUCCESS, "{}", out.report);
    assert_eq!(out.report["nest"]["full_stage_nest"], true);
    assert_eq!(out.report["kernel"]["violations"].as_array().unwrap().len(), 0);
    let out = taf(&["rep-stage", &data("swap.json")]);
    assert_eq!(out.code, exit::NEGATIVE);
}

#[test]
fn oracle_commands() {
    let out = taf(&["oracle-wedge", "--n", "4"]);
    assert_eq!(out.code, exit::SUCCESS);
    assert_eq!(out.report["report"]["mi_wedges"].as_array().unwrap().len(), 10);
    let out = taf(&["oracle-envelope", "--n", "3"]);
    assert_eq!(out.code, exit::SUCCESS);
    let out = taf(&["oracle-envelope", "--presentation", &data("two_level.json")]);
    assert_eq!(out.code, exit::SUCCESS, "{}", out.report);
    let out = taf(&["oracle-wedge", "--n", "40"]);
    assert_eq!(out.code, exit::INPUT_ERROR);
}

#[test]
fn reports_are_deterministic() {
    let a = taf(&["envelope", &data("swap.json"), "--depth", "4"]);
    let b = taf(&["envelope", &data("swap.json"), "--depth", "4"]);
    assert_eq!(render(&a.report, Format::Json), render(&b.report, Format::Json));
    let text = render(&a.report, Format::Text);
    assert!(text.lines().any(|l| l.starts_with("command: envelope")));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_taf");
    let status = |args: &[&str]| Process::new(bin).args(args).output().unwrap();
    let out = status(&["mi-check", &data("t3.json"), &data("t3_wedge_1_2.json")]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["answer"], "yes");
    assert_eq!(status(&["mi-check", &data("t2.json"), &data("t2_j12.json")]).status.code(), Some(1));
    assert_eq!(status(&["prime-check", &data("swap.json")]).status.code(), Some(1));
    assert_eq!(status(&["validate", &data("bad_schema.json")]).status.code(), Some(3));
    assert_eq!(status(&["no-such-command"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.txt");
    let out = status(&["validate", &data("t2.json"), "--format", "text", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(fs::read_to_string(&target).unwrap().contains("valid: true"));
}
