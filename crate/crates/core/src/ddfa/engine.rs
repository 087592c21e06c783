//! Semi-naive forward chaining over canonical facts.
//!
//! Constants are interned in sorted order so that canonicalization on ids
//! agrees with canonicalization on names. Each fact is indexed under every
//! element of its symmetry orbit ("views"), keyed by predicate and by first
//! argument; a premise matches a fact if it unifies with one of its views.
//!
//! Round `r` joins rule premises left to right. For the premise at
//! position `d`, facts new in round `r - 1` are used at `d`, older facts at
//! positions before `d` and all facts at positions after `d`, so every
//! derivation uses at least one fact from the previous round exactly once.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::symmetry::{canonical_in_place, canonicalize, check_arity, orbit, CanonError, Fact, Predicate};
use crate::cancel::CancelToken;
use crate::fof::{HornRule, RuleAtom, Slot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaturationLimits {
    pub max_facts: usize,
    pub max_rounds: usize,
    pub timeout: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("saturation limits must be positive")]
pub struct InvalidLimits;

impl SaturationLimits {
    pub const DEFAULT_MAX_FACTS: usize = 100_000;
    pub const DEFAULT_MAX_ROUNDS: usize = 1000;

    pub fn new(max_facts: usize, max_rounds: usize, timeout: Duration) -> Result<Self, InvalidLimits> {
        if max_facts == 0 || max_rounds == 0 || timeout.is_zero() {
            return Err(InvalidLimits);
        }
        Ok(SaturationLimits { max_facts, max_rounds, timeout })
    }

    /// Default fact and round caps with the given timeout.
    pub fn with_timeout(timeout: Duration) -> Self {
        SaturationLimits {
            max_facts: Self::DEFAULT_MAX_FACTS,
            max_rounds: Self::DEFAULT_MAX_ROUNDS,
            timeout: timeout.max(Duration::from_millis(1)),
        }
    }
}

impl Default for SaturationLimits {
    fn default() -> Self {
        Self::with_timeout(Duration::from_secs(60))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Fixpoint,
    GoalReached,
    FactLimit,
    RoundLimit,
    Timeout,
    Cancelled,
}

impl StopReason {
    pub fn limit_fired(self) -> bool {
        !matches!(self, StopReason::Fixpoint | StopReason::GoalReached)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationStats {
    pub rounds: usize,
    pub derived: usize,
    pub elapsed: Duration,
    pub stop: StopReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Given(String),
    Derived { rule: String, premises: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub fact: Fact,
    pub provenance: Provenance,
    /// Round that produced the fact; 0 for given facts.
    pub round: usize,
}

/// Derivation trace: node `i` is the `i`-th fact inserted, and every
/// derived node's premises have smaller ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProofDag {
    pub nodes: Vec<ProofNode>,
    index: HashMap<Fact, usize>,
}

impl ProofDag {
    pub fn node_of(&self, fact: &Fact) -> Option<usize> {
        self.index.get(fact).copied()
    }

    /// Ids of `root` and all its ancestors, ascending.
    pub fn ancestors(&self, root: usize) -> Vec<usize> {
        let mut keep = vec![false; self.nodes.len()];
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut keep[n], true) {
                continue;
            }
            if let Provenance::Derived { premises, .. } = &self.nodes[n].provenance {
                stack.extend(premises.iter().copied());
            }
        }
        (0..self.nodes.len()).filter(|&i| keep[i]).collect()
    }

    /// Serializes the slice of the DAG that supports `goal`:
    /// `<n>. <fact>  [Given <name>]` or `<n>. <fact>  [<rule>: <p>, ...]`,
    /// numbered from 1 with premise references to earlier lines.
    pub fn render_proof(&self, goal: &Fact) -> Option<String> {
        let root = self.node_of(goal)?;
        let ids = self.ancestors(root);
        let renumber: HashMap<usize, usize> = ids.iter().enumerate().map(|(k, &id)| (id, k + 1)).collect();
        let mut out = String::new();
        for (k, &id) in ids.iter().enumerate() {
            let node = &self.nodes[id];
            let just = match &node.provenance {
                Provenance::Given(name) => format!("Given {name}"),
                Provenance::Derived { rule, premises } => {
                    let refs: Vec<String> = premises.iter().map(|p| renumber[p].to_string()).collect();
                    format!("{rule}: {}", refs.join(", "))
                }
            };
            out.push_str(&format!("{}. {}  [{}]\n", k + 1, node.fact, just));
        }
        Some(out)
    }

    pub fn derived_steps(&self, goal: &Fact) -> usize {
        self.node_of(goal)
            .map(|root| {
                self.ancestors(root)
                    .into_iter()
                    .filter(|&i| matches!(self.nodes[i].provenance, Provenance::Derived { .. }))
                    .count()
            })
            .unwrap_or(0)
    }
}

/// Saturated facts in insertion order, indexed by predicate and by first
/// argument of the canonical form.
#[derive(Debug, Clone, Default)]
pub struct FactBase {
    facts: Vec<Fact>,
    index: HashMap<Fact, usize>,
    by_predicate: HashMap<String, Vec<usize>>,
    by_first: HashMap<(String, String), Vec<usize>>,
}

impl FactBase {
    fn push(&mut self, fact: Fact) {
        let id = self.facts.len();
        self.by_predicate.entry(fact.predicate().to_string()).or_default().push(id);
        self.by_first.entry((fact.predicate().to_string(), fact.args()[0].clone())).or_default().push(id);
        self.index.insert(fact.clone(), id);
        self.facts.push(fact);
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.index.contains_key(fact)
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn with_predicate<'a>(&'a self, predicate: &str) -> impl Iterator<Item = &'a Fact> + 'a {
        let ids = self.by_predicate.get(predicate).map(Vec::as_slice).unwrap_or(&[]);
        ids.iter().map(move |&i| &self.facts[i])
    }

    pub fn with_first_arg<'a>(&'a self, predicate: &str, first: &str) -> impl Iterator<Item = &'a Fact> + 'a {
        let ids = self.by_first.get(&(predicate.to_string(), first.to_string())).map(Vec::as_slice).unwrap_or(&[]);
        ids.iter().map(move |&i| &self.facts[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SaturateError {
    #[error("rule `{rule}`: {source}")]
    Rule { rule: String, source: CanonError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cell {
    Var(usize),
    Const(u32),
}

struct Pattern {
    pred: Predicate,
    cells: Vec<Cell>,
}

struct Compiled {
    id: String,
    premises: Vec<Pattern>,
    guards: Vec<(Cell, Cell)>,
    conclusion: Pattern,
    vars: usize,
}

type Key = (Predicate, Box<[u32]>);

#[derive(Default)]
struct Store {
    facts: Vec<Key>,
    lookup: HashMap<Key, usize>,
    view_args: Vec<Box<[u32]>>,
    view_fact: Vec<usize>,
    by_pred: [Vec<usize>; 8],
    by_first: HashMap<(Predicate, u32), Vec<usize>>,
    provenance: Vec<(Option<usize>, Vec<usize>, usize)>,
}

impl Store {
    fn insert(&mut self, key: Key, rule: Option<usize>, premises: Vec<usize>, round: usize) -> Option<usize> {
        if self.lookup.contains_key(&key) {
            return None;
        }
        let id = self.facts.len();
        for view in orbit(key.0, &key.1) {
            let vid = self.view_args.len();
            self.by_pred[key.0.index()].push(vid);
            self.by_first.entry((key.0, view[0])).or_default().push(vid);
            self.view_args.push(view.into_boxed_slice());
            self.view_fact.push(id);
        }
        self.lookup.insert(key.clone(), id);
        self.facts.push(key);
        self.provenance.push((rule, premises, round));
        Some(id)
    }
}

struct Interner {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Interner {
    fn new(mut names: Vec<String>) -> Self {
        names.sort();
        names.dedup();
        let ids = names.iter().enumerate().map(|(i, n)| (n.clone(), i as u32)).collect();
        Interner { names, ids }
    }
}

struct VarTable<'r, 'i> {
    vars: Vec<&'r str>,
    interner: &'i Interner,
}

impl<'r> VarTable<'r, '_> {
    fn cell(&mut self, s: &'r Slot) -> Cell {
        match s {
            Slot::Const(c) => Cell::Const(self.interner.ids[c]),
            Slot::Var(v) => Cell::Var(match self.vars.iter().position(|x| x == v) {
                Some(i) => i,
                None => {
                    self.vars.push(v);
                    self.vars.len() - 1
                }
            }),
        }
    }

    fn pattern(&mut self, rule: &str, a: &'r RuleAtom) -> Result<Pattern, SaturateError> {
        let pred = check_arity(&a.predicate, a.args.len())
            .map_err(|e| SaturateError::Rule { rule: rule.to_string(), source: e })?;
        Ok(Pattern { pred, cells: a.args.iter().map(|s| self.cell(s)).collect() })
    }
}

fn compile(rule: &HornRule, interner: &Interner) -> Result<Compiled, SaturateError> {
    let mut table = VarTable { vars: Vec::new(), interner };
    let premises = rule.premises.iter().map(|p| table.pattern(&rule.id, p)).collect::<Result<Vec<_>, _>>()?;
    let guards = rule.guards.iter().map(|(a, b)| (table.cell(a), table.cell(b))).collect();
    let conclusion = table.pattern(&rule.id, &rule.conclusion)?;
    Ok(Compiled { id: rule.id.clone(), premises, guards, conclusion, vars: table.vars.len() })
}

fn rule_constants(rules: &[HornRule]) -> impl Iterator<Item = &String> {
    rules.iter().flat_map(|r| {
        r.premises
            .iter()
            .chain(std::iter::once(&r.conclusion))
            .flat_map(|a| a.args.iter())
            .chain(r.guards.iter().flat_map(|(a, b)| [a, b]))
            .filter_map(|s| match s {
                Slot::Const(c) => Some(c),
                Slot::Var(_) => None,
            })
    })
}

/// A configured saturation run.
pub struct Saturator<'a> {
    rules: &'a [HornRule],
    limits: SaturationLimits,
    goal: Option<Fact>,
    cancel: Option<CancelToken>,
}

/// Result of a saturation run.
#[derive(Debug, Clone)]
pub struct Saturation {
    pub base: FactBase,
    pub dag: ProofDag,
    pub stats: SaturationStats,
}

struct Clock {
    start: Instant,
    timeout: Duration,
    cancel: Option<CancelToken>,
    ticks: u32,
    fired: Option<StopReason>,
}

impl Clock {
    fn tick(&mut self) -> bool {
        if self.fired.is_some() {
            return false;
        }
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(1024) {
            self.check();
        }
        self.fired.is_none()
    }

    fn check(&mut self) -> bool {
        if self.fired.is_none() {
            if self.cancel.as_ref().is_some_and(CancelToken::is_cancelled) {
                self.fired = Some(StopReason::Cancelled);
            } else if self.start.elapsed() >= self.timeout {
                self.fired = Some(StopReason::Timeout);
            }
        }
        self.fired.is_none()
    }
}

struct Join<'s> {
    store: &'s Store,
    rule: &'s Compiled,
    ranges: Vec<(usize, usize)>,
    binding: Vec<Option<u32>>,
    chosen: Vec<usize>,
    found: Vec<(Box<[u32]>, Vec<usize>)>,
}

impl Join<'_> {
    fn value(&self, c: Cell) -> Option<u32> {
        match c {
            Cell::Const(k) => Some(k),
            Cell::Var(v) => self.binding[v],
        }
    }

    fn guards_ok(&self) -> bool {
        self.rule.guards.iter().all(|&(a, b)| match (self.value(a), self.value(b)) {
            (Some(x), Some(y)) => x != y,
            _ => true,
        })
    }

    fn run(&mut self, k: usize, clock: &mut Clock) {
        if k == self.rule.premises.len() {
            let concl = &self.rule.conclusion;
            let mut args: Vec<u32> = concl.cells.iter().map(|&c| self.value(c).expect("range-restricted")).collect();
            canonical_in_place(concl.pred, &mut args);
            self.found.push((args.into_boxed_slice(), self.chosen.clone()));
            return;
        }
        let store = self.store;
        let pat = &self.rule.premises[k];
        let candidates: &[usize] = match self.value(pat.cells[0]) {
            Some(first) => store.by_first.get(&(pat.pred, first)).map(Vec::as_slice).unwrap_or(&[]),
            None => &store.by_pred[pat.pred.index()],
        };
        let (lo, hi) = self.ranges[k];
        let start = candidates.partition_point(|&v| store.view_fact[v] < lo);
        let mut newly: Vec<usize> = Vec::with_capacity(pat.cells.len());
        for &vid in &candidates[start..] {
            let fact = store.view_fact[vid];
            if fact >= hi {
                break;
            }
            if !clock.tick() {
                return;
            }
            let view = &store.view_args[vid];
            newly.clear();
            let mut ok = true;
            for (cell, &val) in pat.cells.iter().zip(view.iter()) {
                match *cell {
                    Cell::Const(c) => ok = c == val,
                    Cell::Var(v) => match self.binding[v] {
                        Some(b) => ok = b == val,
                        None => {
                            self.binding[v] = Some(val);
                            newly.push(v);
                        }
                    },
                }
                if !ok {
                    break;
                }
            }
            if ok && self.guards_ok() {
                self.chosen.push(fact);
                self.run(k + 1, clock);
                self.chosen.pop();
            }
            for &v in &newly {
                self.binding[v] = None;
            }
            if clock.fired.is_some() {
                return;
            }
        }
    }
}

impl<'a> Saturator<'a> {
    pub fn new(rules: &'a [HornRule], limits: SaturationLimits) -> Self {
        Saturator { rules, limits, goal: None, cancel: None }
    }

    /// Stop as soon as `goal` is in the base.
    pub fn stop_at(mut self, goal: Fact) -> Self {
        self.goal = Some(goal);
        self
    }

    pub fn cancel_on(mut self, token: CancelToken) -> Self {
        self.cancel = Some(token);
        self
    }

    pub fn run(&self, given: &[(String, Fact)]) -> Result<Saturation, SaturateError> {
        let start = Instant::now();
        let constants: Vec<String> = given
            .iter()
            .flat_map(|(_, f)| f.args().iter())
            .chain(rule_constants(self.rules))
            .cloned()
            .collect();
        let interner = Interner::new(constants);
        let compiled = self.rules.iter().map(|r| compile(r, &interner)).collect::<Result<Vec<_>, _>>()?;
        let key_of = |f: &Fact| -> Option<Key> {
            let pred = Predicate::from_name(f.predicate())?;
            let args: Option<Vec<u32>> = f.args().iter().map(|a| interner.ids.get(a).copied()).collect();
            Some((pred, args?.into_boxed_slice()))
        };
        let goal_key = self.goal.as_ref().and_then(key_of);

        let mut store = Store::default();
        let mut given_names: Vec<Option<String>> = Vec::new();
        for (name, fact) in given {
            let key = key_of(fact).expect("interned");
            if store.insert(key, None, Vec::new(), 0).is_some() {
                given_names.push(Some(name.clone()));
            }
        }
        let initial = store.facts.len();
        let mut clock = Clock { start, timeout: self.limits.timeout, cancel: self.cancel.clone(), ticks: 0, fired: None };

        let mut rounds = 0;
        let mut delta = (0, store.facts.len());
        let goal_in = |store: &Store| goal_key.as_ref().is_some_and(|g| store.lookup.contains_key(g));
        let stop = 'outer: loop {
            if goal_in(&store) {
                break StopReason::GoalReached;
            }
            if delta.0 == delta.1 || compiled.is_empty() {
                break StopReason::Fixpoint;
            }
            if rounds == self.limits.max_rounds {
                break StopReason::RoundLimit;
            }
            if !clock.check() {
                break clock.fired.unwrap();
            }
            rounds += 1;
            for (ri, rule) in compiled.iter().enumerate() {
                for d in 0..rule.premises.len() {
                    let ranges = (0..rule.premises.len())
                        .map(|j| match j.cmp(&d) {
                            std::cmp::Ordering::Less => (0, delta.0),
                            std::cmp::Ordering::Equal => delta,
                            std::cmp::Ordering::Greater => (0, delta.1),
                        })
                        .collect();
                    let mut join = Join {
                        store: &store,
                        rule,
                        ranges,
                        binding: vec![None; rule.vars],
                        chosen: Vec::new(),
                        found: Vec::new(),
                    };
                    join.run(0, &mut clock);
                    let found = std::mem::take(&mut join.found);
                    for (args, premises) in found {
                        let key = (rule.conclusion.pred, args);
                        if store.lookup.contains_key(&key) {
                            continue;
                        }
                        if store.facts.len() >= self.limits.max_facts {
                            break 'outer StopReason::FactLimit;
                        }
                        store.insert(key, Some(ri), premises, rounds);
                        if goal_in(&store) {
                            break 'outer StopReason::GoalReached;
                        }
                    }
                    if let Some(reason) = clock.fired {
                        break 'outer reason;
                    }
                }
            }
            delta = (delta.1, store.facts.len());
        };

        let mut base = FactBase::default();
        let mut dag = ProofDag::default();
        for (id, (key, (rule, premises, round))) in store.facts.iter().zip(&store.provenance).enumerate() {
            let names: Vec<&str> = key.1.iter().map(|&c| interner.names[c as usize].as_str()).collect();
            let fact = canonicalize(key.0.name(), &names).expect("known predicate");
            let provenance = match rule {
                None => Provenance::Given(given_names[id].clone().unwrap_or_default()),
                Some(ri) => Provenance::Derived { rule: compiled[*ri].id.clone(), premises: premises.clone() },
            };
            dag.index.insert(fact.clone(), id);
            dag.nodes.push(ProofNode { fact: fact.clone(), provenance, round: *round });
            base.push(fact);
        }
        let stats = SaturationStats { rounds, derived: store.facts.len() - initial, elapsed: start.elapsed(), stop };
        Ok(Saturation { base, dag, stats })
    }
}

/// Runs to fixpoint or until a limit fires.
pub fn saturate(
    given: &[(String, Fact)],
    rules: &[HornRule],
    limits: SaturationLimits,
) -> Result<Saturation, SaturateError> {
    Saturator::new(rules, limits).run(given)
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Fixpoint => "fixpoint",
            StopReason::GoalReached => "goal reached",
            StopReason::FactLimit => "fact limit",
            StopReason::RoundLimit => "round limit",
            StopReason::Timeout => "timeout",
            StopReason::Cancelled => "cancelled",
        })
    }
}
