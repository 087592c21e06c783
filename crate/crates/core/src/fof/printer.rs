use std::fmt::Write;

use super::ast::{AnnotatedFormula, FofDocument, Formula, Term};

/// Binding strength; higher binds tighter.
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) | Formula::Iff(..) => 1,
        Formula::Or(_) => 2,
        Formula::And(_) => 3,
        _ => 4,
    }
}

pub fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Fn(f, args) => {
            out.push_str(f);
            write_args(out, args);
        }
    }
}

fn write_args(out: &mut String, args: &[Term]) {
    if args.is_empty() {
        return;
    }
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_term(out, a);
    }
    out.push(')');
}

/// Writes `f`, wrapped in parentheses when its precedence is not above `min`.
fn write_operand(out: &mut String, f: &Formula, min: u8) {
    if precedence(f) > min {
        write_formula(out, f);
    } else {
        out.push('(');
        write_formula(out, f);
        out.push(')');
    }
}

pub fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::Atom { predicate, args } => {
            out.push_str(predicate);
            write_args(out, args);
        }
        Formula::Equality { lhs, rhs, negated } => {
            write_term(out, lhs);
            out.push_str(if *negated { " != " } else { " = " });
            write_term(out, rhs);
        }
        Formula::Not(g) => {
            out.push('~');
            write_operand(out, g, 3);
        }
        Formula::And(items) | Formula::Or(items) => {
            let (sep, min) = if matches!(f, Formula::And(_)) { (" & ", 3) } else { (" | ", 2) };
            for (i, g) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                write_operand(out, g, min);
            }
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            write_operand(out, a, 1);
            out.push_str(if matches!(f, Formula::Implies(..)) { " => " } else { " <=> " });
            write_operand(out, b, 1);
        }
        Formula::Forall(vars, body) | Formula::Exists(vars, body) => {
            out.push(if matches!(f, Formula::Forall(..)) { '!' } else { '?' });
            out.push('[');
            out.push_str(&vars.join(","));
            out.push_str("]: ");
            write_operand(out, body, 3);
        }
    }
}

pub fn formula_to_string(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f);
    s
}

pub fn annotated_to_string(f: &AnnotatedFormula) -> String {
    let mut s = String::new();
    let _ = write!(s, "fof({},{},", f.name, f.role);
    write_formula(&mut s, &f.formula);
    s.push_str(").");
    s
}

fn quote(path: &str) -> String {
    path.replace('\\', "\\\\").replace('\'', "\\'")
}

/// Canonical text: includes first, then one formula per line.
pub fn print_fof(doc: &FofDocument) -> String {
    let mut out = String::new();
    for inc in &doc.includes {
        let _ = writeln!(out, "include('{}').", quote(inc));
    }
    for f in &doc.formulas {
        out.push_str(&annotated_to_string(f));
        out.push('\n');
    }
    out
}
