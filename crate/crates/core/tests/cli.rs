// Copyright 2026 The qss-core Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qss")).args(args).output().expect("spawn qss")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn run_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let summary = dir.path().join("s.csv");
    let out = qss(&[
        "run",
        "--d",
        "2",
        "--n",
        "2",
        "--mode",
        "sequential",
        "--trials",
        "1",
        "--seed",
        "7",
        "--emit-trace",
        path(&trace),
        "--summary",
        path(&summary),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(text.lines().count(), 1);
    let line: Value = serde_json::from_str(text.trim_end()).unwrap();
    for key in ["version", "d", "n", "mode", "seed", "trial", "secret", "events", "final_fidelity"] {
        assert!(line.get(key).is_some(), "missing {key}");
    }
    assert_eq!(line["mode"], "sequential");
    assert_eq!(line["seed"], 7);
    assert!((line["final_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let types: Vec<&str> =
        line["events"].as_array().unwrap().iter().map(|e| e["type"].as_str().unwrap()).collect();
    for t in ["gate", "measure", "message", "correction"] {
        assert!(types.contains(&t), "no {t} event");
    }

    let csv = std::fs::read_to_string(&summary).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("d,n,mode,trial,l,m,k_digits,final_fidelity"));
    assert_eq!(lines.count(), 1);
}

#[test]
fn summary_has_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("s.csv");
    let out = qss(&[
        "run",
        "--d",
        "3",
        "--n",
        "2",
        "--mode",
        "parallel",
        "--trials",
        "12",
        "--summary",
        path(&summary),
    ]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_path(&summary).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[3].parse::<usize>().unwrap(), i);
        let f: f64 = row[7].parse().unwrap();
        assert!((0.0..=1.0).contains(&f) && f >= 1.0 - 1e-9);
    }
}

#[test]
fn basis_secret_propagates_a_single_branch() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let out = qss(&["run", "--d", "3", "--n", "3", "--secret", "1,0,0,0,0,0", "--emit-trace", path(&trace)]);
    assert_eq!(code(&out), 0);
    let line: Value = serde_json::from_str(std::fs::read_to_string(&trace).unwrap().trim_end()).unwrap();
    let secret = line["secret"].as_array().unwrap();
    assert_eq!(secret[0]["re"].as_f64(), Some(1.0));
    assert!(secret[1..].iter().all(|a| a["re"].as_f64() == Some(0.0) && a["im"].as_f64() == Some(0.0)));
    assert_eq!(line["final_fidelity"].as_f64(), Some(1.0));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&qss(&["run", "--d", "1", "--n", "2"])), 2);
    assert_eq!(code(&qss(&["run", "--d", "2", "--n", "0"])), 2);
    assert_eq!(code(&qss(&["run", "--d", "2"])), 2);
    assert_eq!(code(&qss(&["run", "--d", "2", "--n", "2", "--mode", "diagonal"])), 2);
    assert_eq!(code(&qss(&["run", "--d", "2", "--n", "2", "--secret", "1,0"])), 2);
    assert_eq!(code(&qss(&["verify", "--grid", "d=2..x"])), 2);
    assert_eq!(code(&qss(&["frobnicate"])), 2);
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(code(&qss(&["--help"])), 0);
    assert_eq!(code(&qss(&["--version"])), 0);
}

#[test]
fn register_cap_exits_3() {
    let out = qss(&["run", "--d", "2", "--n", "4", "--cap", "16"]);
    assert_eq!(code(&out), 3);
    assert_eq!(code(&qss(&["distribution", "--d", "2", "--n", "4", "--samples", "0", "--cap", "16"])), 3);
}

#[test]
fn sloppy_secret_warns_and_normalizes() {
    let out = qss(&["run", "--d", "2", "--n", "2", "--secret", "1,0,1,0"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("norm"));
    let out = qss(&["run", "--d", "2", "--n", "2", "--secret", "0.6,0,0,-0.8"]);
    assert_eq!(code(&out), 0);
    assert!(out.stderr.is_empty());
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("t.jsonl");
    assert_eq!(code(&qss(&["run", "--d", "2", "--n", "2", "--emit-trace", path(&bad)])), 1);
}

#[test]
fn default_verify_passes_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("out.json");
    let out = qss(&["verify", "--report", path(&report)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["failed"], 0);
    let assertions = json["assertions"].as_array().unwrap();
    assert_eq!(assertions.len(), json["total"].as_u64().unwrap() as usize);
    assert!(!assertions.is_empty());
    for a in assertions {
        assert!(a["deviation"].is_number() && a["tolerance"].is_number());
        assert_eq!(a["passed"], true);
    }
    let checks: Vec<&str> = assertions.iter().map(|a| a["check"].as_str().unwrap()).collect();
    for prefix in ["dense.", "marginal.", "fixture."] {
        assert!(checks.iter().any(|c| c.starts_with(prefix)), "no {prefix} checks");
    }
}

#[test]
fn verify_beyond_oracle_cap_exits_3_with_advice() {
    let out = qss(&["verify", "--grid", "d=2..6,n=1..5"]);
    assert_eq!(code(&out), 3);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--oracle-cap") && stderr.contains("--grid"), "{stderr}");
}

#[test]
fn distribution_without_samples() {
    let out = qss(&["distribution", "--d", "3", "--n", "2", "--samples", "0"]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["outcome", "exact_probability", "empirical_frequency", "z_score"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        assert!((row[1].parse::<f64>().unwrap() - 1.0 / 9.0).abs() < 1e-12);
        assert!(row[2].is_empty() && row[3].is_empty());
    }
}

#[test]
fn distribution_sampling_within_five_sigma_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for i in 0..2 {
        let p = dir.path().join(format!("dist{i}.csv"));
        let out = qss(&[
            "distribution",
            "--d",
            "2",
            "--n",
            "2",
            "--samples",
            "10000",
            "--seed",
            "11",
            "--out",
            path(&p),
        ]);
        assert_eq!(code(&out), 0);
        files.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let mut reader = csv::Reader::from_reader(files[0].as_slice());
    let mut total = 0.0;
    for row in reader.records().map(Result::unwrap) {
        assert!(row[3].parse::<f64>().unwrap().abs() <= 5.0);
        total += row[2].parse::<f64>().unwrap();
    }
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn trace_replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let p = dir.path().join(format!("t{i}.jsonl"));
            let out = qss(&[
                "run",
                "--d",
                "4",
                "--n",
                "3",
                "--trials",
                "8",
                "--seed",
                "99",
                "--emit-trace",
                path(&p),
            ]);
            assert_eq!(code(&out), 0);
            std::fs::read(&p).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);

    // a single trial's line depends only on (seed, trial)
    let text = String::from_utf8(runs[0].clone()).unwrap();
    let p = dir.path().join("one.jsonl");
    assert_eq!(
        code(&qss(&[
            "run",
            "--d",
            "4",
            "--n",
            "3",
            "--trials",
            "1",
            "--seed",
            "99",
            "--emit-trace",
            path(&p)
        ])),
        0
    );
    assert_eq!(std::fs::read_to_string(&p).unwrap().lines().next(), text.lines().next());
}
