use std::path::{Path, PathBuf};
use std::time::Duration;

use ogp::ddfa::{
    canonicalize, parse_proof, prove, replay, saturate, Fact, Justification, ProofStep, ReplayError,
    SaturationLimits, StopReason,
};
use ogp::fof::{load_flattened, parse_fof, resolve_includes, to_horn_rules, FofDocument};
use ogp::report::Status;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/fof").join(name)
}

fn load(name: &str) -> FofDocument {
    load_flattened(&fixture(name), &[]).unwrap()
}

fn fact(pred: &str, args: &[&str]) -> Fact {
    canonicalize(pred, args).unwrap()
}

#[test]
fn varignon_is_proved_and_replays() {
    let doc = load("varignon.fof");
    let out = prove(&doc, SaturationLimits::default());
    assert_eq!(out.status, Status::Proved, "{:?}", out.detail);
    let proof = out.proof.unwrap();
    let summary = replay(&proof, &doc).unwrap();
    assert!(summary.derived >= 3, "{proof}");
    assert!(out.stats.unwrap().rounds <= 3);
}

#[test]
fn varignon_intermediate_facts_within_three_rounds() {
    let doc = load("varignon.fof");
    let problem = to_horn_rules(&doc).unwrap();
    let given: Vec<_> = problem
        .facts
        .iter()
        .map(|(n, a)| (n.clone(), ogp::ddfa::canonicalize_atom(a).unwrap()))
        .collect();
    let limits = SaturationLimits::new(100_000, 3, Duration::from_secs(10)).unwrap();
    let sat = saturate(&given, &problem.rules, limits).unwrap();
    for f in [
        fact("para", &["p", "q", "a", "c"]),
        fact("para", &["s", "r", "a", "c"]),
        fact("para", &["p", "q", "s", "r"]),
    ] {
        assert!(sat.base.contains(&f), "missing {f}");
    }
}

#[test]
fn midline_two_facts() {
    let doc = load("midline.fof");
    let problem = to_horn_rules(&doc).unwrap();
    let given: Vec<_> = problem
        .facts
        .iter()
        .map(|(n, a)| (n.clone(), ogp::ddfa::canonicalize_atom(a).unwrap()))
        .collect();
    let sat = saturate(&given, &problem.rules, SaturationLimits::default()).unwrap();
    assert!(sat.base.contains(&fact("para", &["m", "n", "b", "c"])));
    assert_eq!(sat.stats.stop, StopReason::Fixpoint);
}

#[test]
fn empty_rules_keep_input() {
    let given = vec![("h1".to_string(), fact("coll", &["c", "a", "b"]))];
    let sat = saturate(&given, &[], SaturationLimits::default()).unwrap();
    assert_eq!(sat.base.facts(), &[fact("coll", &["a", "b", "c"])]);
    assert_eq!(sat.stats.rounds, 0);
}

#[test]
fn goal_without_facts_is_unknown() {
    let doc = parse_fof("fof(g,conjecture,coll(a,b,c)).").unwrap();
    let out = prove(&doc, SaturationLimits::default());
    assert_eq!(out.status, Status::Unknown);
    assert_eq!(out.stats.unwrap().rounds, 0);
    assert!(out.proof.is_none());
}

#[test]
fn fact_limit_gives_resource_out() {
    let doc = load("varignon.fof");
    let limits = SaturationLimits::new(1, 1000, Duration::from_secs(10)).unwrap();
    assert_eq!(prove(&doc, limits).status, Status::ResourceOut);
}

#[test]
fn unprovable_reaches_fixpoint() {
    let out = prove(&load("unprovable.fof"), SaturationLimits::default());
    assert_eq!(out.status, Status::Unknown);
    assert_eq!(out.stats.unwrap().stop, StopReason::Fixpoint);
}

#[test]
fn quantified_conjecture_is_an_error() {
    let out = prove(&load("quantified.fof"), SaturationLimits::default());
    assert_eq!(out.status, Status::Error);
    assert!(out.detail.is_some());
}

#[test]
fn every_horn_fixture_proves_except_unprovable() {
    for name in [
        "varignon.fof",
        "midline.fof",
        "parallel_chain.fof",
        "perp_para.fof",
        "perp_perp.fof",
        "circumcenter.fof",
        "inscribed_angle.fof",
        "concyclic_converse.fof",
        "eqangle_chain.fof",
        "collinear_midpoints.fof",
        "para_collinear.fof",
    ] {
        let doc = load(name);
        let out = prove(&doc, SaturationLimits::default());
        assert_eq!(out.status, Status::Proved, "{name}: {:?}", out.detail);
        replay(out.proof.as_deref().unwrap(), &doc).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn proofs_are_deterministic() {
    let doc = load("varignon.fof");
    let a = prove(&doc, SaturationLimits::default()).proof;
    let b = prove(&doc, SaturationLimits::default()).proof;
    assert_eq!(a, b);
}

fn render(steps: &[ProofStep]) -> String {
    let mut out = String::new();
    for s in steps {
        let just = match &s.justification {
            Justification::Given(h) => format!("Given {h}"),
            Justification::Rule { id, premises } => {
                let refs: Vec<String> = premises.iter().map(usize::to_string).collect();
                format!("{id}: {}", refs.join(", "))
            }
        };
        out.push_str(&format!("{}. {}  [{}]\n", s.number, s.fact, just));
    }
    out
}

#[test]
fn corrupted_premise_reference_fails_at_that_step() {
    let doc = load("varignon.fof");
    let proof = prove(&doc, SaturationLimits::default()).proof.unwrap();
    let mut steps = parse_proof(&proof).unwrap();
    assert_eq!(render(&steps), proof);
    let (idx, premises) = steps
        .iter_mut()
        .enumerate()
        .find_map(|(i, s)| match &mut s.justification {
            Justification::Rule { id, premises } if id == "ddfa_midline" => Some((i, premises)),
            _ => None,
        })
        .unwrap();
    // Swap in an earlier step that cannot play the first premise's role.
    let replacement = (1..=idx).find(|n| !premises.contains(n)).unwrap();
    premises[0] = replacement;
    let err = replay(&render(&steps), &doc).unwrap_err();
    assert!(matches!(err, ReplayError::Step { step, .. } if step == idx + 1), "{err}");
}

#[test]
fn empty_proof_of_given_goal() {
    let doc = parse_fof("fof(h1,hypothesis,coll(a,b,c)).\nfof(g,conjecture,coll(c,b,a)).").unwrap();
    assert_eq!(replay("", &doc).unwrap().derived, 0);
    let doc = parse_fof("fof(h1,hypothesis,coll(a,b,c)).\nfof(g,conjecture,coll(c,b,d)).").unwrap();
    assert!(replay("", &doc).is_err());
}

#[test]
fn bundled_axioms_resolve_without_disk_file() {
    let doc = parse_fof("include('axioms/ddfa.ax').\nfof(g,conjecture,coll(a,b,c)).").unwrap();
    let flat = resolve_includes(&doc, None, &[]).unwrap();
    assert_eq!(to_horn_rules(&flat).unwrap().rules.len(), 12);
}

