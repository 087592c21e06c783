use std::collections::BTreeMap;

use serde::Serialize;

use crate::fof::{FofDocument, Formula, Role};

/// Predicates of the deductive-database rule base.
pub const DD_VOCABULARY: [&str; 8] = ["coll", "para", "perp", "midp", "cong", "eqangle", "cyclic", "circle"];

/// Key under which equalities are counted in the predicate multiset.
pub const EQUALITY: &str = "=";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SyntacticFeatures {
    pub hypothesis_count: usize,
    pub predicates: BTreeMap<String, usize>,
    pub dd_vocabulary_only: bool,
    pub has_quantifiers: bool,
    pub max_formula_depth: usize,
}

fn count(f: &Formula, into: &mut BTreeMap<String, usize>) {
    match f {
        Formula::Atom { predicate, .. } => *into.entry(predicate.clone()).or_default() += 1,
        Formula::Equality { .. } => *into.entry(EQUALITY.to_string()).or_default() += 1,
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => count(g, into),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| count(g, into)),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            count(a, into);
            count(b, into);
        }
    }
}

/// True iff every key of `predicates` is DD vocabulary.
pub fn is_dd_vocabulary(predicates: &BTreeMap<String, usize>) -> bool {
    predicates.keys().all(|p| DD_VOCABULARY.contains(&p.as_str()))
}

/// Features of the problem proper: axioms (typically the included rule
/// base) are skipped, so every rule-base problem is not disqualified by the
/// rule file's own quantifiers and guards.
pub fn extract_features(doc: &FofDocument) -> SyntacticFeatures {
    let mut feats = SyntacticFeatures::default();
    for f in doc.formulas.iter().filter(|f| f.role != Role::Axiom) {
        if f.role == Role::Hypothesis {
            feats.hypothesis_count += 1;
        }
        count(&f.formula, &mut feats.predicates);
        feats.has_quantifiers |= f.formula.has_quantifiers();
        feats.max_formula_depth = feats.max_formula_depth.max(f.formula.depth());
    }
    feats.dd_vocabulary_only = is_dd_vocabulary(&feats.predicates);
    feats
}
