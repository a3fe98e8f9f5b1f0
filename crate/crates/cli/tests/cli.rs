use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn engine() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pest-engine"));
    cmd.env_remove("PEST_ENGINE_THREADS").env_remove("RUST_LOG");
    cmd
}

fn case_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/case_study.json")
}

fn run(args: &[&str]) -> Output {
    engine().args(args).output().expect("engine runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_lists_every_flag() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let help = String::from_utf8(out.stdout).unwrap();
    for flag in [
        "--config",
        "--out",
        "--dt",
        "--horizon",
        "--resolution",
        "--scenario",
        "--switch-times",
        "--seed",
        "--assessed",
        "--prevalence",
        "--mc-samples",
    ] {
        assert!(help.contains(flag), "{flag} missing from --help");
    }
    for sub in ["policy", "simulate", "sweep", "timing"] {
        assert!(help.contains(sub), "{sub} missing from --help");
    }
}

#[test]
fn policy_prints_three_decisions() {
    let config = case_config();
    let out = run(&["policy", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = doc["entries"].as_array().unwrap();
    let states: Vec<_> = entries.iter().map(|e| e["assessed"].as_str().unwrap()).collect();
    assert_eq!(states, ["healthy", "infested", "dying"]);
    for e in entries {
        let d = &e["decision"];
        let s = d["s_star"].as_f64().unwrap();
        assert_eq!(d["price"].as_f64().unwrap(), 250.0 - s);
        assert!((0.0..=1.0).contains(&d["treat_prob"].as_f64().unwrap()));
    }
}

#[test]
fn assessed_filter_keeps_one_entry() {
    let config = case_config();
    let out = run(&[
        "policy",
        "--config",
        config.to_str().unwrap(),
        "--assessed",
        "infested",
        "--prevalence",
        "0.7,0.2,0.1",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["entries"].as_array().unwrap().len(), 1);
    assert_eq!(doc["entries"][0]["assessed"], "infested");
    assert_eq!(doc["prevalence"]["p_i"], 0.2);
}

#[test]
fn monte_carlo_agrees_with_closed_form() {
    let config = case_config();
    let out = run(&[
        "policy",
        "--config",
        config.to_str().unwrap(),
        "--prevalence",
        "0.97,0.02,0.01",
        "--mc-samples",
        "20000",
        "--seed",
        "11",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    for e in doc["entries"].as_array().unwrap() {
        if let Some(mc) = e.get("monte_carlo") {
            let exact = e["decision"]["treat_prob"].as_f64().unwrap();
            let est = mc["treat_prob"].as_f64().unwrap();
            let se = mc["std_error"].as_f64().unwrap().max(1e-3);
            assert!((est - exact).abs() <= 5.0 * se, "{est} vs {exact}");
        }
    }
}

#[test]
fn simulate_writes_six_trajectories_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = case_config();
    let args = [
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--horizon",
        "10",
    ];
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "manifest.json",
            "traj_none_none.csv",
            "traj_none_optimal.csv",
            "traj_nosub_none.csv",
            "traj_nosub_optimal.csv",
            "traj_optimal_none.csv",
            "traj_optimal_optimal.csv",
        ]
    );
    let header = fs::read_to_string(dir.path().join("traj_none_none.csv")).unwrap();
    assert!(header.starts_with(
        "t,H_m,I_m,D_m,H_o,I_o,D_o,p_thm,p_tim,p_tho,p_tio,s_hat_h,s_hat_i,s_hat_d,net_value_m,net_value_o\n"
    ));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["files"]["traj_none_none.csv"]["rows"], 41);
    assert_eq!(manifest["overrides"]["horizon"], "10");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert!(!fs::read_to_string(dir.path().join("manifest.json"))
        .unwrap()
        .contains("time"));
}

#[test]
fn reruns_are_byte_identical() {
    let config = case_config();
    let snapshot = |threads: &str| {
        let dir = tempfile::tempdir().unwrap();
        for cmd in ["simulate", "sweep", "timing"] {
            let out = engine()
                .env("PEST_ENGINE_THREADS", threads)
                .args([
                    cmd,
                    "--config",
                    config.to_str().unwrap(),
                    "--out",
                    dir.path().to_str().unwrap(),
                    "--horizon",
                    "20",
                    "--resolution",
                    "20",
                ])
                .output()
                .unwrap();
            assert_eq!(code(&out), 0, "{}", stderr(&out));
        }
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    let first = snapshot("0");
    assert_eq!(first.len(), 10);
    assert_eq!(first, snapshot("1"));
}

#[test]
fn single_scenario_and_timing_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = case_config();
    let base = [
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ];
    let out = run(&[
        &[
            "simulate",
            "--scenario",
            "private=nosub,public=optimal",
            "--horizon",
            "5",
        ],
        &base[..],
    ]
    .concat());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(dir.path().join("traj_nosub_optimal.csv").exists());
    assert!(!dir.path().join("traj_none_none.csv").exists());

    let out = run(&[&["timing", "--switch-times", "0,3.5,14"], &base[..]].concat());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("timing.csv")).unwrap();
    let survival: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(survival.len(), 3);
    assert!(survival[0] >= survival[1] && survival[1] > survival[2]);
    // the overrides differ, so the second run starts a fresh manifest
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["files"].as_object().unwrap().len(), 1);
}

#[test]
fn coarse_step_exits_with_step_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = case_config();
    let out = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--dt",
        "5",
    ]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("--dt"), "{}", stderr(&out));
}

#[test]
fn missing_config_names_the_path() {
    let out = run(&["policy", "--config", "/definitely/not/here.json"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("/definitely/not/here.json"));
    assert_eq!(code(&run(&["policy"])), 2);
}

#[test]
fn invalid_config_reports_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(case_config())
        .unwrap()
        .replace("\"beta\": 1.0", "\"beta\": -1.0")
        .replace("\"p_h\": 0.8", "\"p_h\": 0.9");
    let path = dir.path().join("bad.json");
    fs::write(&path, text).unwrap();
    let out = run(&["policy", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("epidemic.beta") && err.contains("prevalence"), "{err}");
    assert!(out.stdout.is_empty());

    fs::write(&path, "{ not json").unwrap();
    assert_eq!(code(&run(&["sweep", "--config", path.to_str().unwrap()])), 2);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let config = case_config();
    let out = run(&[
        "timing",
        "--config",
        config.to_str().unwrap(),
        "--out",
        blocker.join("sub").to_str().unwrap(),
        "--switch-times",
        "0",
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn bad_thread_setting_is_rejected() {
    let config = case_config();
    let out = engine()
        .env("PEST_ENGINE_THREADS", "many")
        .args(["policy", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
