use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use ogp::ddfa::{canonicalize, saturate, Fact, Predicate, SaturationLimits};
use ogp::fof::{load_flattened, to_horn_rules, GroundAtom, HornProblem, HornRule};
use proptest::prelude::RngExt;
use proptest::test_runner::{RngAlgorithm, TestRng};

mod common;
use common::{naive_fixpoint, orbit, orbit_min, Args, Facts};

fn canonical_given(problem: &HornProblem) -> Vec<(String, Fact)> {
    problem.facts.iter().map(|(n, a)| (n.clone(), canonicalize(&a.predicate, &a.args).unwrap())).collect()
}

fn engine_fixpoint(given: &[(String, Fact)], rules: &[HornRule]) -> Facts {
    let s = saturate(given, rules, SaturationLimits::default()).unwrap();
    assert!(!s.stats.stop.limit_fired(), "{:?}", s.stats.stop);
    s.base.facts().iter().map(|f| (f.predicate().to_string(), f.args().to_vec())).collect()
}

fn as_facts(given: &[(String, Fact)]) -> Facts {
    given.iter().map(|(_, f)| (f.predicate().to_string(), f.args().to_vec())).collect()
}

fn horn_corpus() -> Vec<(PathBuf, HornProblem)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/fof");
    let mut paths: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths
        .into_iter()
        .filter_map(|p| {
            let doc = load_flattened(&p, &[]).unwrap();
            to_horn_rules(&doc).ok().map(|h| (p, h))
        })
        .collect()
}

fn points(problem: &HornProblem) -> BTreeSet<String> {
    problem.facts.iter().flat_map(|(_, a)| a.args.iter().cloned()).collect()
}

#[test]
fn semi_naive_matches_naive_on_small_corpus_problems() {
    let mut checked = 0;
    for (path, problem) in horn_corpus() {
        if points(&problem).len() > 8 {
            continue;
        }
        let given = canonical_given(&problem);
        let fast = engine_fixpoint(&given, &problem.rules);
        let slow = naive_fixpoint(&as_facts(&given), &problem.rules);
        assert_eq!(fast, slow, "{}", path.display());
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} problems checked");
}

const NAMES: [&str; 9] = ["a", "b", "c", "d", "a1", "a10", "a2", "p", "m_ab"];

fn random_args(rng: &mut TestRng, n: usize) -> Args {
    (0..n).map(|_| NAMES[rng.random_range(0..NAMES.len())].to_string()).collect()
}

#[test]
fn canonical_form_is_the_orbit_minimum() {
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    for pred in Predicate::ALL {
        let name = pred.name();
        for _ in 0..1000 {
            let args = random_args(&mut rng, pred.arity());
            let fact = canonicalize(name, &args).unwrap();
            assert_eq!(fact.args(), orbit_min(name, &args).as_slice(), "{name}{args:?}");
            assert!(fact.is_canonical());
            // Idempotent, and constant on the orbit.
            assert_eq!(canonicalize(name, fact.args()).unwrap(), fact);
            for view in orbit(name, &args) {
                assert_eq!(canonicalize(name, &view).unwrap(), fact);
            }
        }
    }
}

#[test]
fn group_sizes() {
    let sizes: Vec<usize> =
        Predicate::ALL.iter().map(|p| orbit(p.name(), &(0..p.arity()).map(|i| i.to_string()).collect::<Vec<_>>()).len()).collect();
    let built: Vec<usize> = Predicate::ALL.iter().map(|p| p.group().len()).collect();
    assert_eq!(sizes, built);
}

#[test]
fn saturation_is_monotone_under_added_facts() {
    let (_, problem) = horn_corpus().into_iter().find(|(p, _)| p.ends_with("varignon.fof")).unwrap();
    let pts: Vec<String> = points(&problem).into_iter().collect();
    let given = canonical_given(&problem);
    let base = engine_fixpoint(&given, &problem.rules);
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let preds = [Predicate::Coll, Predicate::Para, Predicate::Midp, Predicate::Perp, Predicate::Cong];
    for k in 0..20 {
        let mut more = given.clone();
        for j in 0..rng.random_range(1..3) {
            let pred = preds[rng.random_range(0..preds.len())];
            let args: Vec<&str> = (0..pred.arity()).map(|_| pts[rng.random_range(0..pts.len())].as_str()).collect();
            let atom = GroundAtom::new(pred.name(), &args);
            more.push((format!("extra{k}_{j}"), canonicalize(&atom.predicate, &atom.args).unwrap()));
        }
        let bigger = engine_fixpoint(&more, &problem.rules);
        assert!(base.is_subset(&bigger), "perturbation {k} lost facts");
    }
}
