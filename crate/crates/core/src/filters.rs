//! `filter*toFOF`: conversion of parsed conjectures to FOF.
//!
//! Every filter output starts with an include of the deductive-database
//! axiom set, followed by one hypothesis per emitted atom (`h1..hn`, in
//! step order) and the conjecture `goal`. No non-degeneracy hypotheses are
//! emitted.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::fof::{print_fof, AnnotatedFormula, FofDocument, Formula, Role, Span, Term, DEFAULT_AXIOM_INCLUDE};
use crate::format::Format;
use crate::frontends::{parse_gcl, parse_ggb_xml, parse_jgex, FrontendError, GeoConjecture, GoalPredicate, StepKind};

#[derive(Debug, Error)]
pub enum FilterError {
    #[error(transparent)]
    Parse(#[from] FrontendError),
    #[error("points `{0}` and `{1}` both map to constant `{2}`")]
    LabelCollision(String, String, String),
    #[error("format {0} has no FOF filter")]
    NoFilter(Format),
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub fn goal_symbol(p: GoalPredicate) -> &'static str {
    match p {
        GoalPredicate::Collinear => "coll",
        GoalPredicate::Parallel => "para",
        GoalPredicate::Perpendicular => "perp",
        GoalPredicate::Congruent => "cong",
        GoalPredicate::Midpoint => "midp",
        GoalPredicate::EqAngle => "eqangle",
        GoalPredicate::Cyclic => "cyclic",
    }
}

fn atom(pred: &str, consts: &HashMap<&str, String>, labels: &[&String]) -> Formula {
    Formula::atom(pred, labels.iter().map(|l| Term::constant(consts[l.as_str()].clone())).collect())
}

pub fn conjecture_to_fof(c: &GeoConjecture, axiom_include: &str) -> Result<FofDocument, FilterError> {
    let mut consts: HashMap<&str, String> = HashMap::new();
    let mut owner: HashMap<String, &str> = HashMap::new();
    for p in &c.points {
        let lower = p.to_ascii_lowercase();
        if let Some(prev) = owner.get(&lower) {
            return Err(FilterError::LabelCollision(prev.to_string(), p.clone(), lower));
        }
        owner.insert(lower.clone(), p);
        consts.insert(p, lower);
    }

    let mut hyps: Vec<Formula> = Vec::new();
    for s in &c.steps {
        let i: Vec<&String> = s.inputs.iter().collect();
        let o = &s.output;
        match s.kind {
            StepKind::FreePoint => {}
            StepKind::Midpoint => hyps.push(atom("midp", &consts, &[o, i[0], i[1]])),
            StepKind::Foot => {
                hyps.push(atom("perp", &consts, &[i[0], o, i[1], i[2]]));
                hyps.push(atom("coll", &consts, &[o, i[1], i[2]]));
            }
            StepKind::IntersectLines => {
                hyps.push(atom("coll", &consts, &[o, i[0], i[1]]));
                hyps.push(atom("coll", &consts, &[o, i[2], i[3]]));
            }
            StepKind::CircleCenter3 => hyps.push(atom("circle", &consts, &[o, i[0], i[1], i[2]])),
        }
    }

    let goal_args: Vec<&String> = c.goal.args.iter().collect();
    let mut formulas: Vec<AnnotatedFormula> = hyps
        .into_iter()
        .enumerate()
        .map(|(k, formula)| AnnotatedFormula {
            name: format!("h{}", k + 1),
            role: Role::Hypothesis,
            formula,
            span: Span::default(),
        })
        .collect();
    formulas.push(AnnotatedFormula {
        name: "goal".into(),
        role: Role::Conjecture,
        formula: atom(goal_symbol(c.goal.predicate), &consts, &goal_args),
        span: Span::default(),
    });
    Ok(FofDocument { includes: vec![axiom_include.to_string()], formulas })
}

/// Parses `text` in the given dialect.
pub fn parse_dialect(format: Format, text: &str) -> Result<GeoConjecture, FilterError> {
    Ok(match format {
        Format::Gcl => parse_gcl(text)?,
        Format::Jgex => parse_jgex(text)?,
        Format::Geogebra => parse_ggb_xml(text)?,
        other => return Err(FilterError::NoFilter(other)),
    })
}

/// Parse + convert + print.
pub fn convert_text(format: Format, text: &str, axiom_include: &str) -> Result<String, FilterError> {
    let c = parse_dialect(format, text)?;
    Ok(print_fof(&conjecture_to_fof(&c, axiom_include)?))
}

/// Body of the `filter<X>toFOF` commands. Nothing is written to `output`
/// unless conversion succeeds.
pub fn filter_cli(
    format: Format,
    mut input: impl Read,
    mut output: impl Write,
    mut errors: impl Write,
    axiom_include: Option<&str>,
) -> i32 {
    let result = (|| {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        let text = String::from_utf8(bytes).map_err(|_| FilterError::Encoding)?;
        let fof = convert_text(format, &text, axiom_include.unwrap_or(DEFAULT_AXIOM_INCLUDE))?;
        output.write_all(fof.as_bytes())?;
        output.flush()?;
        Ok::<_, FilterError>(())
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(errors, "filter{}toFOF: {e}", filter_label(format));
            1
        }
    }
}

/// Command line shared by the `filter<X>toFOF` binaries.
#[derive(Debug, clap::Parser)]
pub struct FilterArgs {
    /// Input file; standard input when absent or `-`.
    pub input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Path written in the leading include directive.
    #[arg(long, default_value = DEFAULT_AXIOM_INCLUDE)]
    pub axioms: String,
}

/// Entry point of a filter binary; returns the process exit code.
pub fn filter_main(format: Format, args: FilterArgs) -> i32 {
    let label = filter_label(format);
    let input: Box<dyn Read> = match args.input.as_deref() {
        None => Box::new(std::io::stdin()),
        Some(p) if p == Path::new("-") => Box::new(std::io::stdin()),
        Some(p) => match File::open(p) {
            Ok(f) => Box::new(f),
            Err(e) => {
                eprintln!("filter{label}toFOF: {}: {e}", p.display());
                return 1;
            }
        },
    };
    let mut out = Vec::new();
    let code = filter_cli(format, input, &mut out, std::io::stderr(), Some(&args.axioms));
    if code != 0 {
        return code;
    }
    let written = match &args.output {
        Some(p) => std::fs::write(p, &out).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(&out).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("filter{label}toFOF: {e}");
            1
        }
    }
}

pub fn filter_label(format: Format) -> &'static str {
    match format {
        Format::Gcl => "GCL",
        Format::Jgex => "JGEX",
        Format::Geogebra => "GEOGEBRA",
        Format::Fof => "FOF",
        Format::Coqam => "COQAM",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fof::parse_fof;

    #[test]
    fn free_point_only() {
        let c = parse_gcl("point A\nprove { collinear A A A }").unwrap();
        let doc = conjecture_to_fof(&c, DEFAULT_AXIOM_INCLUDE).unwrap();
        assert_eq!(print_fof(&doc), "include('axioms/ddfa.ax').\nfof(goal,conjecture,coll(a,a,a)).\n");
    }

    #[test]
    fn step_mapping() {
        let c = parse_gcl(
            "point A\npoint B\npoint C\npoint D\nfoot F C A B\nintersec X A B C D\ncirclecenter O A B C\n\
             midpoint M A B\nprove { cyclic A B C D }",
        )
        .unwrap();
        let text = print_fof(&conjecture_to_fof(&c, "ax.ax").unwrap());
        let expected = "include('ax.ax').\n\
fof(h1,hypothesis,perp(c,f,a,b)).\n\
fof(h2,hypothesis,coll(f,a,b)).\n\
fof(h3,hypothesis,coll(x,a,b)).\n\
fof(h4,hypothesis,coll(x,c,d)).\n\
fof(h5,hypothesis,circle(o,a,b,c)).\n\
fof(h6,hypothesis,midp(m,a,b)).\n\
fof(goal,conjecture,cyclic(a,b,c,d)).\n";
        assert_eq!(text, expected);
        assert!(parse_fof(&text).is_ok());
    }

    #[test]
    fn lowercase_collision() {
        let c = parse_gcl("point B\npoint b\nprove { collinear B b B }").unwrap();
        assert!(matches!(conjecture_to_fof(&c, "x"), Err(FilterError::LabelCollision(..))));
    }

    #[test]
    fn cli_writes_nothing_on_error() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = filter_cli(Format::Gcl, "point A\nbogus\n".as_bytes(), &mut out, &mut err, None);
        assert_ne!(code, 0);
        assert!(out.is_empty());
        assert!(String::from_utf8(err).unwrap().contains("bogus"));
    }
}
