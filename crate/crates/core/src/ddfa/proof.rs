//! Proof text parsing and independent replay.

use std::collections::HashMap;

use thiserror::Error;

use super::symmetry::{canonicalize_atom, check_arity, orbit, Fact};
use crate::fof::{to_horn_rules, FofDocument, GroundAtom, HornError, HornRule, RuleAtom, Slot};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Given(String),
    Rule { id: String, premises: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub number: usize,
    pub fact: GroundAtom,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("line {line}: cannot read proof step: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("step {step}: {reason}")]
    Step { step: usize, reason: String },
    #[error("proof does not end with the goal {goal}")]
    WrongGoal { goal: String },
    #[error(transparent)]
    Problem(#[from] HornError),
}

fn parse_atom(text: &str) -> Option<GroundAtom> {
    let (pred, rest) = text.split_once('(')?;
    let inner = rest.strip_suffix(')')?;
    let args: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).collect();
    if pred.is_empty() || args.iter().any(String::is_empty) {
        return None;
    }
    Some(GroundAtom { predicate: pred.trim().to_string(), args })
}

pub fn parse_proof(text: &str) -> Result<Vec<ProofStep>, ReplayError> {
    let mut steps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let bad = |reason: &str| ReplayError::Malformed { line, reason: reason.to_string() };
        let (num, rest) = raw.split_once(". ").ok_or_else(|| bad("expected `<n>. <fact>  [...]`"))?;
        let number: usize = num.parse().map_err(|_| bad("step number is not an integer"))?;
        let open = rest.find('[').ok_or_else(|| bad("missing `[justification]`"))?;
        let just = rest[open + 1..].strip_suffix(']').ok_or_else(|| bad("missing closing `]`"))?;
        let fact = parse_atom(rest[..open].trim()).ok_or_else(|| bad("cannot read the fact"))?;
        let justification = if let Some(name) = just.strip_prefix("Given ") {
            Justification::Given(name.trim().to_string())
        } else {
            let (id, refs) = just.split_once(':').ok_or_else(|| bad("expected `Given <name>` or `<rule>: <refs>`"))?;
            let premises = refs
                .split(',')
                .map(|r| r.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad("premise references must be step numbers"))?;
            Justification::Rule { id: id.trim().to_string(), premises }
        };
        steps.push(ProofStep { number, fact, justification });
    }
    Ok(steps)
}

type Subst = HashMap<String, String>;

fn unify(pattern: &RuleAtom, args: &[String], subst: &mut Subst) -> bool {
    for (slot, value) in pattern.args.iter().zip(args) {
        match slot {
            Slot::Const(c) => {
                if c != value {
                    return false;
                }
            }
            Slot::Var(v) => match subst.get(v) {
                Some(bound) if bound != value => return false,
                Some(_) => {}
                None => {
                    subst.insert(v.clone(), value.clone());
                }
            },
        }
    }
    true
}

fn resolve<'s>(slot: &'s Slot, subst: &'s Subst) -> Option<&'s str> {
    match slot {
        Slot::Const(c) => Some(c),
        Slot::Var(v) => subst.get(v).map(String::as_str),
    }
}

/// Searches for a substitution matching every premise to its cited fact
/// (up to symmetry) under which the conclusion canonicalizes to `target`.
fn instance_exists(rule: &HornRule, cited: &[&Fact], target: &Fact, k: usize, subst: &Subst) -> bool {
    if k == rule.premises.len() {
        let guards_ok = rule.guards.iter().all(|(a, b)| resolve(a, subst) != resolve(b, subst));
        if !guards_ok {
            return false;
        }
        let Some(args) = rule.conclusion.args.iter().map(|s| resolve(s, subst)).collect::<Option<Vec<_>>>() else {
            return false;
        };
        let atom = GroundAtom { predicate: rule.conclusion.predicate.clone(), args: args.into_iter().map(String::from).collect() };
        return canonicalize_atom(&atom).is_ok_and(|f| &f == target);
    }
    let premise = &rule.premises[k];
    let fact = cited[k];
    if premise.predicate != fact.predicate() || premise.args.len() != fact.args().len() {
        return false;
    }
    let Ok(pred) = check_arity(fact.predicate(), fact.args().len()) else {
        return false;
    };
    orbit(pred, fact.args()).into_iter().any(|view| {
        let mut next = subst.clone();
        unify(premise, &view, &mut next) && instance_exists(rule, cited, target, k + 1, &next)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplaySummary {
    pub steps: usize,
    pub derived: usize,
}

/// Checks `proof` against the problem in `doc` (flattened, Horn).
pub fn replay(proof: &str, doc: &FofDocument) -> Result<ReplaySummary, ReplayError> {
    let problem = to_horn_rules(doc)?;
    let steps = parse_proof(proof)?;
    let goal = canonicalize_atom(&problem.goal)
        .map_err(|e| ReplayError::Step { step: 0, reason: format!("goal: {e}") })?;
    let given: HashMap<&str, &GroundAtom> = problem.facts.iter().map(|(n, a)| (n.as_str(), a)).collect();
    let rules: HashMap<&str, &HornRule> = problem.rules.iter().map(|r| (r.id.as_str(), r)).collect();

    if steps.is_empty() {
        let goal_given = problem.facts.iter().any(|(_, a)| canonicalize_atom(a).is_ok_and(|f| f == goal));
        return if goal_given {
            Ok(ReplaySummary { steps: 0, derived: 0 })
        } else {
            Err(ReplayError::WrongGoal { goal: goal.to_string() })
        };
    }

    let mut facts: Vec<Fact> = Vec::with_capacity(steps.len());
    let mut derived = 0;
    for (pos, step) in steps.iter().enumerate() {
        let n = step.number;
        let fail = |reason: String| ReplayError::Step { step: n, reason };
        if n != pos + 1 {
            return Err(fail(format!("expected step number {}", pos + 1)));
        }
        let fact = canonicalize_atom(&step.fact).map_err(|e| fail(e.to_string()))?;
        match &step.justification {
            Justification::Given(name) => {
                let atom = given.get(name.as_str()).ok_or_else(|| fail(format!("no hypothesis named `{name}`")))?;
                let stated = canonicalize_atom(atom).map_err(|e| fail(e.to_string()))?;
                if stated != fact {
                    return Err(fail(format!("hypothesis `{name}` states {stated}, not {fact}")));
                }
            }
            Justification::Rule { id, premises } => {
                let rule = rules.get(id.as_str()).ok_or_else(|| fail(format!("unknown rule `{id}`")))?;
                if premises.len() != rule.premises.len() {
                    return Err(fail(format!(
                        "rule `{id}` has {} premises, {} cited",
                        rule.premises.len(),
                        premises.len()
                    )));
                }
                let mut cited = Vec::with_capacity(premises.len());
                for &p in premises {
                    if p == 0 || p >= n {
                        return Err(fail(format!("premise {p} is not an earlier step")));
                    }
                    cited.push(&facts[p - 1]);
                }
                if !instance_exists(rule, &cited, &fact, 0, &Subst::new()) {
                    return Err(fail(format!("{fact} is not an instance of `{id}` from the cited premises")));
                }
                derived += 1;
            }
        }
        facts.push(fact);
    }
    if facts.last() != Some(&goal) {
        return Err(ReplayError::WrongGoal { goal: goal.to_string() });
    }
    Ok(ReplaySummary { steps: facts.len(), derived })
}
