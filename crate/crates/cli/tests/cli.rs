//! End-to-end runs of the `mergegame` binary: the full stage-by-stage
//! pipeline on synthetic data, config handling, and failure modes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mergegame"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn mergegame");
    assert!(
        out.status.success(),
        "mergegame {args:?} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn pipeline_runs_stage_by_stage() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let tracks = data.join("tracks.csv");
    let meta = data.join("meta.json");
    let sequences = dir.path().join("sequences.jsonl");
    let weights = dir.path().join("weights.jsonl");
    let model = dir.path().join("model.json");
    let records = dir.path().join("records.jsonl");
    let report = dir.path().join("report.json");
    let safety = dir.path().join("safety.json");

    run_ok(&[
        "synth",
        "--out-dir",
        path_str(&data),
        "--sequences",
        "16",
        "--seed",
        "5",
    ]);
    assert!(tracks.exists() && meta.exists());

    run_ok(&[
        "calibrate",
        "--tracks",
        path_str(&tracks),
        "--meta",
        path_str(&meta),
        "--out",
        path_str(&sequences),
    ]);
    let seq_lines = std::fs::read_to_string(&sequences).unwrap();
    assert_eq!(seq_lines.lines().count(), 16);

    run_ok(&[
        "optimize",
        "--sequences",
        path_str(&sequences),
        "--out",
        path_str(&weights),
    ]);

    run_ok(&[
        "train-map",
        "--weights",
        path_str(&weights),
        "--out",
        path_str(&model),
        "--bins",
        "10",
    ]);
    let model_json = read_json(&model);
    assert_eq!(model_json["version"], 1);
    assert_eq!(model_json["bins"], 10);

    let csv = dir.path().join("decisions.csv");
    run_ok(&[
        "decide",
        "--model",
        path_str(&model),
        "--sequences",
        path_str(&sequences),
        "--out",
        path_str(&records),
        "--csv",
        path_str(&csv),
    ]);
    assert!(csv.exists());

    run_ok(&[
        "evaluate",
        "--records",
        path_str(&records),
        "--out",
        path_str(&report),
        "--sequences",
        path_str(&sequences),
        "--baseline",
        "0.8,0.2,0.8,0.2",
        "--baseline",
        "0.2,0.8,0.2,0.8",
    ]);
    let report_json = read_json(&report);
    assert_eq!(report_json["sequences"], 16);
    let similarity = report_json["similarity"].as_f64().unwrap();
    assert!(similarity >= 0.70, "similarity {similarity}");
    assert_eq!(report_json["baselines"].as_array().unwrap().len(), 2);
    let matches = report_json["matches"].as_u64().unwrap();
    let points = report_json["points"].as_u64().unwrap();
    assert!(matches <= points);

    run_ok(&[
        "replay",
        "--sequences",
        path_str(&sequences),
        "--model",
        path_str(&model),
        "--safety-gap",
        "0.0",
        "--out",
        path_str(&safety),
    ]);
    let safety_json = read_json(&safety);
    assert_eq!(safety_json["violating_sequences"], 0);
    assert_eq!(safety_json["safety_gap"], 0.0);
}

#[test]
fn run_subcommand_drives_the_whole_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    run_ok(&[
        "synth",
        "--out-dir",
        path_str(&data),
        "--sequences",
        "12",
        "--seed",
        "11",
    ]);
    let experiment = dir.path().join("experiment.json");
    let out_dir = dir.path().join("out");
    std::fs::write(
        &experiment,
        serde_json::json!({
            "tracks": data.join("tracks.csv"),
            "meta": data.join("meta.json"),
            "out_dir": out_dir,
        })
        .to_string(),
    )
    .unwrap();
    let out = run_ok(&["run", "--experiment", path_str(&experiment)]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("similarity"), "stdout: {stdout}");
    for artifact in [
        "sequences.jsonl",
        "weights.jsonl",
        "model.json",
        "records.jsonl",
        "decisions.csv",
        "report.json",
    ] {
        assert!(out_dir.join(artifact).exists(), "missing {artifact}");
    }
}

#[test]
fn config_file_and_env_var_are_honored() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    run_ok(&[
        "synth",
        "--out-dir",
        path_str(&data),
        "--sequences",
        "8",
        "--seed",
        "3",
    ]);
    let sequences = dir.path().join("sequences.jsonl");
    run_ok(&[
        "calibrate",
        "--tracks",
        path_str(&data.join("tracks.csv")),
        "--meta",
        path_str(&data.join("meta.json")),
        "--out",
        path_str(&sequences),
    ]);
    let weights = dir.path().join("weights.jsonl");
    run_ok(&[
        "optimize",
        "--sequences",
        path_str(&sequences),
        "--out",
        path_str(&weights),
    ]);

    // bins=4 via --config
    let config = dir.path().join("tool.json");
    std::fs::write(&config, r#"{ "bins": 4 }"#).unwrap();
    let model = dir.path().join("model_flag.json");
    run_ok(&[
        "--config",
        path_str(&config),
        "train-map",
        "--weights",
        path_str(&weights),
        "--out",
        path_str(&model),
    ]);
    assert_eq!(read_json(&model)["bins"], 4);

    // bins=5 via the environment fallback
    let config5 = dir.path().join("tool5.json");
    std::fs::write(&config5, r#"{ "bins": 5 }"#).unwrap();
    let model_env = dir.path().join("model_env.json");
    let out = bin()
        .env("MERGEGAME_CONFIG", &config5)
        .args([
            "train-map",
            "--weights",
            path_str(&weights),
            "--out",
            path_str(&model_env),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read_json(&model_env)["bins"], 5);

    // an explicit flag beats the config
    let model_override = dir.path().join("model_override.json");
    run_ok(&[
        "--config",
        path_str(&config),
        "train-map",
        "--weights",
        path_str(&weights),
        "--out",
        path_str(&model_override),
        "--bins",
        "6",
    ]);
    assert_eq!(read_json(&model_override)["bins"], 6);
}

#[test]
fn failures_are_stage_tagged_and_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let tracks = dir.path().join("bad.csv");
    std::fs::write(
        &tracks,
        "frame,id,x,y,xVelocity,yVelocity,yAcceleration,laneId\n1,7,0,0,0,0,0,2\n",
    )
    .unwrap();
    let meta = dir.path().join("meta.json");
    std::fs::write(
        &meta,
        r#"{"frame_rate":25.0,"lane_markings":[0.0,3.5,7.0,10.5],"ramp_lane_ids":[3],"ramp_end_x":400.0,"x_direction":1.0}"#,
    )
    .unwrap();
    let out = bin()
        .args([
            "calibrate",
            "--tracks",
            path_str(&tracks),
            "--meta",
            path_str(&meta),
            "--out",
            path_str(&dir.path().join("seq.jsonl")),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("calibrate"), "stderr: {stderr}");
    assert!(stderr.contains("xAcceleration"), "stderr: {stderr}");

    // adaptive replay without a model is a usage error
    let out = bin()
        .args([
            "replay",
            "--sequences",
            path_str(&dir.path().join("missing.jsonl")),
            "--out",
            path_str(&dir.path().join("safety.json")),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
