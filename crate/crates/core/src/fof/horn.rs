//! Reading a flattened FOF document as a ground Horn problem.

use std::fmt;

use thiserror::Error;

use super::ast::{FofDocument, Formula, Role, Term};

/// Premise atoms with this predicate are guards, not database lookups.
pub const GUARD_PREDICATE: &str = "distinct";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: &[&str]) -> Self {
        GroundAtom { predicate: predicate.into(), args: args.iter().map(|s| s.to_string()).collect() }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.args.join(","))
    }
}

/// Argument of a rule atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Slot {
    Var(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleAtom {
    pub predicate: String,
    pub args: Vec<Slot>,
}

impl RuleAtom {
    fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|s| match s {
            Slot::Var(v) => Some(v.as_str()),
            Slot::Const(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornRule {
    pub id: String,
    pub premises: Vec<RuleAtom>,
    /// Pairs that must bind to different constants.
    pub guards: Vec<(Slot, Slot)>,
    pub conclusion: RuleAtom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornProblem {
    /// Ground facts with the name of the formula that stated them.
    pub facts: Vec<(String, GroundAtom)>,
    pub rules: Vec<HornRule>,
    pub goal: GroundAtom,
    pub goal_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HornError {
    #[error("formula `{name}` is not a Horn clause: {reason}")]
    NonHorn { name: String, reason: String },
    #[error("rule `{name}` is not range-restricted: variable {variable} does not occur in a premise")]
    NotRangeRestricted { name: String, variable: String },
    #[error("conjecture `{name}` must be a ground atom")]
    NonGroundConjecture { name: String },
    #[error("document has no conjecture")]
    MissingConjecture,
    #[error("document still has includes; resolve them first")]
    UnresolvedIncludes,
}

fn non_horn(name: &str, reason: impl Into<String>) -> HornError {
    HornError::NonHorn { name: name.to_string(), reason: reason.into() }
}

fn slot(name: &str, t: &Term, bound: &[String]) -> Result<Slot, HornError> {
    match t {
        Term::Var(v) if bound.contains(v) => Ok(Slot::Var(v.clone())),
        Term::Var(v) => Err(non_horn(name, format!("free variable {v}"))),
        Term::Fn(c, args) if args.is_empty() => Ok(Slot::Const(c.clone())),
        Term::Fn(f, _) => Err(non_horn(name, format!("function term `{f}(...)`"))),
    }
}

fn rule_atom(name: &str, f: &Formula, bound: &[String]) -> Result<RuleAtom, HornError> {
    match f {
        Formula::Atom { predicate, args } => Ok(RuleAtom {
            predicate: predicate.clone(),
            args: args.iter().map(|t| slot(name, t, bound)).collect::<Result<_, _>>()?,
        }),
        Formula::Equality { .. } => Err(non_horn(name, "equality is not supported")),
        _ => Err(non_horn(name, "expected an atom")),
    }
}

fn ground(name: &str, atom: RuleAtom) -> Result<GroundAtom, HornError> {
    let args = atom
        .args
        .into_iter()
        .map(|s| match s {
            Slot::Const(c) => Ok(c),
            Slot::Var(v) => Err(non_horn(name, format!("variable {v} in a fact"))),
        })
        .collect::<Result<_, _>>()?;
    Ok(GroundAtom { predicate: atom.predicate, args })
}

enum Clause {
    Fact(GroundAtom),
    Rule(HornRule),
}

fn clause(name: &str, formula: &Formula) -> Result<Clause, HornError> {
    let mut bound: Vec<String> = Vec::new();
    let mut body = formula;
    while let Formula::Forall(vars, inner) = body {
        bound.extend(vars.iter().cloned());
        body = inner;
    }
    match body {
        Formula::Implies(lhs, rhs) => {
            let premise_formulas: Vec<&Formula> = match &**lhs {
                Formula::And(items) => items.iter().collect(),
                other => vec![other],
            };
            let mut premises = Vec::new();
            let mut guards = Vec::new();
            for p in premise_formulas {
                let atom = rule_atom(name, p, &bound)?;
                if atom.predicate == GUARD_PREDICATE {
                    let [a, b]: [Slot; 2] = atom
                        .args
                        .try_into()
                        .map_err(|_| non_horn(name, "distinct/2 takes two arguments"))?;
                    guards.push((a, b));
                } else {
                    premises.push(atom);
                }
            }
            let conclusion = rule_atom(name, rhs, &bound)?;
            if conclusion.predicate == GUARD_PREDICATE {
                return Err(non_horn(name, "distinct/2 may only appear as a premise guard"));
            }
            if premises.is_empty() {
                return Err(non_horn(name, "rule has no premises"));
            }
            let premise_vars: Vec<&str> = premises.iter().flat_map(RuleAtom::vars).collect();
            let guard_vars = guards.iter().flat_map(|(a, b)| [a, b]).filter_map(|s| match s {
                Slot::Var(v) => Some(v.as_str()),
                Slot::Const(_) => None,
            });
            if let Some(v) = conclusion.vars().chain(guard_vars).find(|v| !premise_vars.contains(v)) {
                return Err(HornError::NotRangeRestricted { name: name.to_string(), variable: v.to_string() });
            }
            Ok(Clause::Rule(HornRule { id: name.to_string(), premises, guards, conclusion }))
        }
        Formula::Atom { .. } => {
            let atom = rule_atom(name, body, &bound)?;
            if atom.predicate == GUARD_PREDICATE {
                return Err(non_horn(name, "distinct/2 may only appear as a premise guard"));
            }
            if let Some(v) = atom.vars().next() {
                return Err(HornError::NotRangeRestricted { name: name.to_string(), variable: v.to_string() });
            }
            Ok(Clause::Fact(ground(name, atom)?))
        }
        Formula::Equality { .. } => Err(non_horn(name, "equality is not supported")),
        _ => Err(non_horn(name, "expected an atom or `![...]: (a1 & ... & an => c)`")),
    }
}

/// Splits an include-free document into ground facts, range-restricted
/// rules and a ground goal.
pub fn to_horn_rules(doc: &FofDocument) -> Result<HornProblem, HornError> {
    if !doc.includes.is_empty() {
        return Err(HornError::UnresolvedIncludes);
    }
    let mut facts = Vec::new();
    let mut rules = Vec::new();
    let mut goal = None;
    for f in &doc.formulas {
        if f.role == Role::Conjecture {
            let atom = match &f.formula {
                Formula::Atom { .. } => rule_atom(&f.name, &f.formula, &[]),
                _ => Err(HornError::NonGroundConjecture { name: f.name.clone() }),
            }
            .map_err(|_| HornError::NonGroundConjecture { name: f.name.clone() })?;
            if atom.predicate == GUARD_PREDICATE {
                return Err(non_horn(&f.name, "distinct/2 cannot be a goal"));
            }
            goal = Some((f.name.clone(), ground(&f.name, atom)?));
            continue;
        }
        match clause(&f.name, &f.formula)? {
            Clause::Fact(a) => facts.push((f.name.clone(), a)),
            Clause::Rule(r) => rules.push(r),
        }
    }
    let (goal_name, goal) = goal.ok_or(HornError::MissingConjecture)?;
    Ok(HornProblem { facts, rules, goal, goal_name })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fof::{parse_fof, BUNDLED_AXIOMS};

    fn horn(text: &str) -> Result<HornProblem, HornError> {
        to_horn_rules(&parse_fof(&format!("{text}\nfof(goal,conjecture,coll(a,b,c)).")).unwrap())
    }

    #[test]
    fn midline_rule_has_two_premises() {
        let p = horn("fof(r3,axiom,![M,N,A,B,C]: ((midp(M,A,B) & midp(N,A,C)) => para(M,N,B,C))).").unwrap();
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.rules[0].id, "r3");
        assert_eq!(p.rules[0].premises.len(), 2);
        assert!(p.rules[0].guards.is_empty());
        assert_eq!(p.rules[0].conclusion.predicate, "para");
    }

    #[test]
    fn hypothesis_is_fact() {
        let p = horn("fof(h,hypothesis,midp(m,a,b)).").unwrap();
        assert_eq!(p.facts, vec![("h".to_string(), GroundAtom::new("midp", &["m", "a", "b"]))]);
        assert_eq!(p.goal, GroundAtom::new("coll", &["a", "b", "c"]));
    }

    #[test]
    fn unrestricted_variable_rejected() {
        let err = horn("fof(bad,axiom,![X,Y]: (coll(X,a,b) => para(X,Y,a,b))).").unwrap_err();
        assert_eq!(err, HornError::NotRangeRestricted { name: "bad".into(), variable: "Y".into() });
    }

    #[test]
    fn guards_split_out() {
        let p = horn("fof(r,axiom,![A,B]: (coll(A,B,c) & distinct(A,B) => coll(B,A,c))).").unwrap();
        assert_eq!(p.rules[0].premises.len(), 1);
        assert_eq!(p.rules[0].guards, vec![(Slot::Var("A".into()), Slot::Var("B".into()))]);
    }

    #[test]
    fn bundled_axioms_are_horn() {
        let doc = parse_fof(&format!("{BUNDLED_AXIOMS}\nfof(goal,conjecture,coll(a,b,c)).")).unwrap();
        let p = to_horn_rules(&doc).unwrap();
        assert_eq!(p.rules.len(), 12);
        assert!(p.facts.is_empty());
    }

    #[test]
    fn shape_errors() {
        let cases = [
            "fof(e,axiom,a = b).",
            "fof(o,axiom,p(a) | q(a)).",
            "fof(f,axiom,p(f(a))).",
            "fof(d,axiom,distinct(a,b)).",
            "fof(z,axiom,![X]: p(X)).",
            "fof(n,axiom,![X]: (distinct(X,a) => p(X))).",
            "fof(v,axiom,p(a) => q(X)).",
        ];
        for c in cases {
            assert!(horn(c).is_err(), "{c}");
        }
        let doc = parse_fof("fof(g,conjecture,![X]: coll(X,a,b)).").unwrap();
        assert!(matches!(to_horn_rules(&doc), Err(HornError::NonGroundConjecture { .. })));
        let doc = parse_fof("fof(g,conjecture,coll(X,a,b)).").unwrap();
        assert!(matches!(to_horn_rules(&doc), Err(HornError::NonGroundConjecture { .. })));
        let doc = parse_fof("fof(h,hypothesis,coll(a,b,c)).").unwrap();
        assert_eq!(to_horn_rules(&doc), Err(HornError::MissingConjecture));
    }
}
