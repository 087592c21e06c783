//! Oracles and helpers shared by integration tests. Nothing here calls
//! into the code it checks beyond reading data types.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use ogp::fof::{Formula, HornRule, Slot, Term};
use ogp::gasc::{ResultMatrix, ScoreTable};
use ogp::report::Status;
use proptest::prelude::*;

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub type Args = Vec<String>;
pub type Facts = BTreeSet<(String, Args)>;

/// Generators of each predicate's argument symmetries, written out by hand.
pub fn generators(pred: &str) -> Vec<Vec<usize>> {
    let swap = |n: usize, i: usize, j: usize| {
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(i, j);
        p
    };
    match pred {
        "coll" => vec![swap(3, 0, 1), swap(3, 1, 2)],
        "cyclic" => vec![swap(4, 0, 1), swap(4, 1, 2), swap(4, 2, 3)],
        "midp" => vec![swap(3, 1, 2)],
        "circle" => vec![swap(4, 1, 2), swap(4, 2, 3)],
        "perp" => vec![swap(4, 0, 1), swap(4, 2, 3)],
        "para" | "cong" => vec![swap(4, 0, 1), swap(4, 2, 3), vec![2, 3, 0, 1]],
        "eqangle" => vec![vec![4, 5, 6, 7, 0, 1, 2, 3]],
        other => panic!("no symmetry model for {other}"),
    }
}

/// Closure of `args` under the generators, by breadth-first search.
pub fn orbit(pred: &str, args: &[String]) -> BTreeSet<Args> {
    let gens = generators(pred);
    let mut seen = BTreeSet::from([args.to_vec()]);
    let mut queue = VecDeque::from([args.to_vec()]);
    while let Some(a) = queue.pop_front() {
        for g in &gens {
            let image: Args = g.iter().map(|&i| a[i].clone()).collect();
            if seen.insert(image.clone()) {
                queue.push_back(image);
            }
        }
    }
    seen
}

pub fn orbit_min(pred: &str, args: &[String]) -> Args {
    orbit(pred, args).into_iter().next().unwrap()
}

fn unify(slots: &[Slot], args: &[String], env: &mut BTreeMap<String, String>) -> bool {
    for (s, a) in slots.iter().zip(args) {
        let ok = match s {
            Slot::Const(c) => c == a,
            Slot::Var(v) => env.entry(v.clone()).or_insert_with(|| a.clone()) == a,
        };
        if !ok {
            return false;
        }
    }
    true
}

fn value(s: &Slot, env: &BTreeMap<String, String>) -> String {
    match s {
        Slot::Const(c) => c.clone(),
        Slot::Var(v) => env[v].clone(),
    }
}

fn fire(rule: &HornRule, facts: &Facts, k: usize, env: &BTreeMap<String, String>, out: &mut Facts) {
    if k == rule.premises.len() {
        if rule.guards.iter().all(|(a, b)| value(a, env) != value(b, env)) {
            let c = &rule.conclusion;
            let args: Args = c.args.iter().map(|s| value(s, env)).collect();
            out.insert((c.predicate.clone(), orbit_min(&c.predicate, &args)));
        }
        return;
    }
    let p = &rule.premises[k];
    for (pred, args) in facts.iter().filter(|f| f.0 == p.predicate) {
        for view in orbit(pred, args) {
            let mut next = env.clone();
            if unify(&p.args, &view, &mut next) {
                fire(rule, facts, k + 1, &next, out);
            }
        }
    }
}

/// Recomputes every consequence from scratch until nothing changes.
pub fn naive_fixpoint(given: &Facts, rules: &[HornRule]) -> Facts {
    let mut facts = given.clone();
    loop {
        let mut next = facts.clone();
        for r in rules {
            fire(r, &facts, 0, &BTreeMap::new(), &mut next);
        }
        if next.len() == facts.len() {
            return facts;
        }
        facts = next;
    }
}

/// (prover, solved, time, rank) with rank = 1 + number of strictly better
/// provers, sorted by rank then name.
pub fn score_oracle(matrix: &ResultMatrix) -> Vec<(String, usize, u64, usize)> {
    let mut rows: Vec<(String, usize, u64)> = Vec::new();
    for (k, prover) in matrix.provers.iter().enumerate() {
        let mut solved = 0;
        let mut time = 0;
        for r in &matrix.cells[k] {
            if r.status == Status::Proved || r.status == Status::Disproved {
                solved += 1;
                time += r.time_ms;
            }
        }
        rows.push((prover.clone(), solved, time));
    }
    let better = |a: &(String, usize, u64), b: &(String, usize, u64)| a.1 > b.1 || (a.1 == b.1 && a.2 < b.2);
    let mut out: Vec<_> =
        rows.iter().map(|r| (r.0.clone(), r.1, r.2, 1 + rows.iter().filter(|o| better(o, r)).count())).collect();
    out.sort_by(|a, b| (a.3, &a.0).cmp(&(b.3, &b.0)));
    out
}

pub fn flat_scores(t: &ScoreTable) -> Vec<(String, usize, u64, usize)> {
    t.rows.iter().map(|r| (r.prover.clone(), r.solved, r.time_ms, r.rank)).collect()
}

const FUNCTORS: [&str; 4] = ["a", "f", "mid", "g1"];
const PREDICATES: [&str; 4] = ["p", "coll", "para", "q_2"];
const VARS: [&str; 4] = ["X", "Y", "Z1", "W_b"];

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..VARS.len()).prop_map(|i| Term::var(VARS[i])),
        (0..FUNCTORS.len()).prop_map(|i| Term::constant(FUNCTORS[i])),
    ];
    leaf.prop_recursive(2, 8, 3, |inner| {
        ((0..FUNCTORS.len()), prop::collection::vec(inner, 1..3)).prop_map(|(i, args)| Term::Fn(FUNCTORS[i].into(), args))
    })
}

fn atomic() -> impl Strategy<Value = Formula> {
    prop_oneof![
        ((0..PREDICATES.len()), prop::collection::vec(term(), 0..4))
            .prop_map(|(i, args)| Formula::atom(PREDICATES[i], args)),
        (term(), term(), any::<bool>()).prop_map(|(lhs, rhs, negated)| Formula::Equality { lhs, rhs, negated }),
    ]
}

/// Random formulas of depth at most 6: five recursive levels over atoms.
pub fn formula() -> impl Strategy<Value = Formula> {
    atomic().prop_recursive(5, 48, 4, |inner| {
        let vars = prop::collection::btree_set(0..VARS.len(), 1..3)
            .prop_map(|s| s.into_iter().map(|i| VARS[i].to_string()).collect::<Vec<_>>());
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Iff(Box::new(a), Box::new(b))),
            (vars.clone(), inner.clone()).prop_map(|(v, f)| Formula::Forall(v, Box::new(f))),
            (vars, inner).prop_map(|(v, f)| Formula::Exists(v, Box::new(f))),
        ]
    })
}

/// Alive means present in /proc and not a zombie.
pub fn alive(pid: u32) -> bool {
    match fs::read_to_string(format!("/proc/{pid}/stat")) {
        Ok(stat) => {
            let state = stat.rsplit(')').next().and_then(|s| s.split_whitespace().next());
            !matches!(state, Some("Z") | Some("X"))
        }
        Err(_) => false,
    }
}

pub fn marker_pids(marker: &Path) -> Vec<u32> {
    fs::read_to_string(marker).unwrap_or_default().lines().filter_map(|l| l.trim().parse().ok()).collect()
}

/// Pids from `marker` still alive after a grace period for reaping.
pub fn survivors(marker: &Path, grace: Duration) -> Vec<u32> {
    let pids = marker_pids(marker);
    let until = Instant::now() + grace;
    while pids.iter().any(|&p| alive(p)) && Instant::now() < until {
        thread::sleep(Duration::from_millis(20));
    }
    pids.into_iter().filter(|&p| alive(p)).collect()
}
