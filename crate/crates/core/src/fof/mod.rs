//! The TPTP first-order (FOF) subset used as the common conjecture format.

mod ast;
mod horn;
mod include;
mod parser;
mod printer;

pub use ast::{AnnotatedFormula, FofDocument, Formula, Role, Span, Term};
pub use horn::{to_horn_rules, GroundAtom, HornError, HornProblem, HornRule, RuleAtom, Slot, GUARD_PREDICATE};
pub use include::{load_flattened, resolve_includes, IncludeError, BUNDLED_AXIOMS, DEFAULT_AXIOM_INCLUDE};
pub use parser::{parse_fof, parse_formula, ParseError, ParseErrorKind};
pub use printer::{annotated_to_string, formula_to_string, print_fof};

