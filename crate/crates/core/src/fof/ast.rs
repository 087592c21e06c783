use std::fmt;

/// A first-order term: an uppercase variable or a lowercase function
/// application (arity 0 is a constant).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Fn(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Fn(name.into(), Vec::new())
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Fn(_, args) => args.iter().all(Term::is_ground),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom { predicate: String, args: Vec<Term> },
    Equality { lhs: Term, rhs: Term, negated: bool },
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom { predicate: predicate.into(), args }
    }

    /// Nesting depth; atoms and equalities have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Equality { .. } => 1,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.depth(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Implies(a, b) | Formula::Iff(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn has_quantifiers(&self) -> bool {
        match self {
            Formula::Atom { .. } | Formula::Equality { .. } => false,
            Formula::Forall(..) | Formula::Exists(..) => true,
            Formula::Not(f) => f.has_quantifiers(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::has_quantifiers),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.has_quantifiers() || b.has_quantifiers(),
        }
    }

    /// Calls `f` with every predicate symbol occurring in an atom, in
    /// left-to-right order (equalities are not atoms here).
    pub fn visit_predicates<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Formula::Atom { predicate, .. } => f(predicate),
            Formula::Equality { .. } => {}
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit_predicates(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_predicates(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_predicates(f);
                b.visit_predicates(f);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Axiom,
    Hypothesis,
    Definition,
    Conjecture,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Axiom => "axiom",
            Role::Hypothesis => "hypothesis",
            Role::Definition => "definition",
            Role::Conjecture => "conjecture",
        }
    }

    pub fn from_name(name: &str) -> Option<Role> {
        match name {
            "axiom" => Some(Role::Axiom),
            "hypothesis" => Some(Role::Hypothesis),
            "definition" => Some(Role::Definition),
            "conjecture" => Some(Role::Conjecture),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A `fof(name, role, formula).` item.
///
/// Equality ignores `span`: two formulas are the same item if they have the
/// same name, role and formula, wherever they were read from.
#[derive(Debug, Clone)]
pub struct AnnotatedFormula {
    pub name: String,
    pub role: Role,
    pub formula: Formula,
    pub span: Span,
}

impl PartialEq for AnnotatedFormula {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.role == other.role && self.formula == other.formula
    }
}

impl Eq for AnnotatedFormula {}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FofDocument {
    pub includes: Vec<String>,
    pub formulas: Vec<AnnotatedFormula>,
}

impl FofDocument {
    pub fn conjecture(&self) -> Option<&AnnotatedFormula> {
        self.formulas.iter().find(|f| f.role == Role::Conjecture)
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = &AnnotatedFormula> {
        self.formulas.iter().filter(move |f| f.role == role)
    }

    pub fn is_empty(&self) -> bool {
        self.includes.is_empty() && self.formulas.is_empty()
    }
}
