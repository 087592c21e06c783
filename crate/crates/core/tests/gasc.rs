use std::fs;
use std::path::Path;

use ogp::gasc::{emit, results_csv, run_competition, score, CompetitionConfig, GascError, ResultMatrix, RunOptions, ScoreTable, TableFormat};
use ogp::report::{RunReport, Status};
use ogp::runtime::Registry;
use proptest::prelude::RngExt;
use proptest::test_runner::{RngAlgorithm, TestRng};

mod common;
use common::{fixture, flat_scores, score_oracle};

const STUB: &str = env!("CARGO_BIN_EXE_ogp-stub");

fn registry(dir: &Path) -> Registry {
    let path = dir.join("provers.json");
    let json = format!(
        r#"{{"provers":[{{"name":"sleeper","kind":"external","exec":"{STUB}","formats":["fof"],"args":["sleep","10"]}}]}}"#
    );
    fs::write(&path, json).unwrap();
    Registry::load(&path).unwrap()
}

fn config(name: &str, out: &Path) -> CompetitionConfig {
    let mut c = CompetitionConfig::load(&fixture(&format!("gasc/{name}"))).unwrap();
    c.output_dir = out.to_path_buf();
    c
}

#[test]
fn fixture_competition() {
    let dir = tempfile::tempdir().unwrap();
    let reg = registry(dir.path());
    let c = config("competition.json", &dir.path().join("out"));
    let m = run_competition(&c, &reg, &RunOptions::default()).unwrap();
    assert_eq!(m.problems, ["varignon", "midline", "unprovable"]);
    assert_eq!(m.cells.len(), 2);
    assert!(m.cells.iter().all(|row| row.len() == 3));
    use Status::*;
    assert_eq!(m.statuses(), [vec![Proved, Proved, Unknown], vec![Timeout, Timeout, Timeout]]);
    let t = score(&m);
    assert_eq!((t.rows[0].prover.as_str(), t.rows[0].rank, t.rows[0].solved), ("ddfa", 1, 2));
    assert_eq!(flat_scores(&t), score_oracle(&m));
    for p in ["ddfa", "sleeper"] {
        for q in &m.problems {
            assert!(dir.path().join(format!("out/raw/{p}__{q}.log")).is_file());
        }
    }
}

#[test]
fn native_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let reg = Registry::default();
    let a = run_competition(&config("native.json", &dir.path().join("a")), &reg, &RunOptions::default()).unwrap();
    let b = run_competition(&config("native.json", &dir.path().join("b")), &reg, &RunOptions { jobs: 3, endpoint: None }).unwrap();
    assert_eq!(a.statuses(), b.statuses());
    let (ta, tb) = (score(&a), score(&b));
    let names = |t: &ScoreTable| t.rows.iter().map(|r| (r.prover.clone(), r.solved, r.rank)).collect::<Vec<_>>();
    assert_eq!(names(&ta), names(&tb));
    assert_eq!(flat_scores(&ta), score_oracle(&a));
}

#[test]
fn emission_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let reg = Registry::default();
    let m = run_competition(&config("native.json", &dir.path().join("run")), &reg, &RunOptions::default()).unwrap();
    let t = score(&m);
    for format in [TableFormat::Csv, TableFormat::Markdown] {
        let first = emit(&t, &m, &dir.path().join("e1"), format).unwrap();
        let second = emit(&t, &m, &dir.path().join("e2"), format).unwrap();
        for (x, y) in first.iter().zip(&second) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
    }
    let csv = String::from_utf8(fs::read(dir.path().join("e1/results.csv")).unwrap()).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
    assert_eq!(csv.lines().next(), Some("prover,problem,status,time_ms"));
    assert!(dir.path().join("e2/scores.md").is_file() && dir.path().join("e2/scores.csv").is_file());
}

#[test]
fn unregistered_prover_fails_before_any_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config("native.json", &dir.path().join("out"));
    c.provers.push("nosuch".into());
    let e = run_competition(&c, &Registry::default(), &RunOptions::default()).unwrap_err();
    assert!(matches!(e, GascError::Unregistered(ref n) if n == "nosuch"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unreadable_problem_fails_before_any_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config("native.json", &dir.path().join("out"));
    c.problems.push(dir.path().join("absent.fof").to_string_lossy().into_owned());
    assert!(matches!(run_competition(&c, &Registry::default(), &RunOptions::default()), Err(GascError::Problem { .. })));
    c.problems.pop();
    c.problems.push("GEO0001".into());
    // No endpoint configured.
    assert!(matches!(run_competition(&c, &Registry::default(), &RunOptions::default()), Err(GascError::Problem { .. })));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn invalid_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config("native.json", dir.path());
    c.per_problem_timeout_ms = 0;
    assert!(matches!(c.validate(), Err(GascError::Config(_))));
    let mut c = config("native.json", dir.path());
    c.problems.clear();
    assert!(c.validate().is_err());
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"provers":["ddfa"],"problems":["a.fof"],"per_problem_timeout":5,"output_dir":"o","extra":1}"#).unwrap();
    assert!(CompetitionConfig::load(&bad).is_err());
}

#[test]
fn single_cell() {
    let dir = tempfile::tempdir().unwrap();
    let c = CompetitionConfig {
        provers: vec!["ddfa".into()],
        problems: vec![fixture("fof/midline.fof").to_string_lossy().into_owned()],
        per_problem_timeout_ms: 2000,
        output_dir: dir.path().to_path_buf(),
    };
    let m = run_competition(&c, &Registry::default(), &RunOptions::default()).unwrap();
    assert_eq!(m.statuses(), [vec![Status::Proved]]);
}

fn random_matrix(rng: &mut TestRng) -> ResultMatrix {
    let provers = rng.random_range(1..6);
    let problems = rng.random_range(1..6);
    let statuses = [Status::Proved, Status::Disproved, Status::Unknown, Status::Timeout, Status::ResourceOut, Status::Error];
    let mut cells = Vec::new();
    for _ in 0..provers {
        let row = (0..problems)
            .map(|_| RunReport {
                prover: String::new(),
                status: statuses[rng.random_range(0..statuses.len())],
                // Few distinct times so ties actually occur.
                time_ms: rng.random_range(0..4) * 100,
                proof_path: None,
                raw_output: String::new(),
                detail: None,
            })
            .collect();
        cells.push(row);
    }
    ResultMatrix {
        provers: (0..provers).map(|k| format!("p{}", (k * 7) % provers)).collect(),
        problems: (0..problems).map(|k| format!("q{k}")).collect(),
        cells,
    }
}

#[test]
fn score_agrees_with_oracle_on_random_matrices() {
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    for _ in 0..100 {
        let m = random_matrix(&mut rng);
        let t = score(&m);
        assert_eq!(flat_scores(&t), score_oracle(&m), "{:?}", m.statuses());
        assert_eq!(results_csv(&m).unwrap(), results_csv(&m.clone()).unwrap());
    }
}
