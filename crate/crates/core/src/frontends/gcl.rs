//! GCL subset, one statement per line:
//!
//! ```text
//! point <L> [<x> <y>]
//! midpoint <L> <A> <B>
//! foot <L> <P> <A> <B>
//! intersec <L> <A> <B> <C> <D>
//! circlecenter <L> <A> <B> <C>
//! prove { <goalword> <args...> }
//! ```
//!
//! `%` starts a comment. Coordinates on `point` are checked and dropped.

use super::model::{Builder, FrontendError, GeoConjecture, GoalPredicate, StepKind};

pub fn parse_gcl(text: &str) -> Result<GeoConjecture, FrontendError> {
    let mut b = Builder::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let code = raw.split('%').next().unwrap_or("");
        let spaced = code.replace('{', " { ").replace('}', " } ");
        let words: Vec<&str> = spaced.split_whitespace().collect();
        let Some((&cmd, rest)) = words.split_first() else {
            continue;
        };
        let syntax = |message: String| FrontendError::Syntax { line, message };
        match cmd {
            "point" => match rest {
                [label] => b.step(line, StepKind::FreePoint, label, &[])?,
                [label, x, y] => {
                    if x.parse::<f64>().is_err() || y.parse::<f64>().is_err() {
                        return Err(syntax(format!("point `{label}`: coordinates must be numbers")));
                    }
                    b.step(line, StepKind::FreePoint, label, &[])?
                }
                _ => return Err(syntax("expected `point <label> [<x> <y>]`".into())),
            },
            "midpoint" | "foot" | "intersec" | "circlecenter" => {
                let kind = match cmd {
                    "midpoint" => StepKind::Midpoint,
                    "foot" => StepKind::Foot,
                    "intersec" => StepKind::IntersectLines,
                    _ => StepKind::CircleCenter3,
                };
                let Some((out, inputs)) = rest.split_first() else {
                    return Err(syntax(format!("`{cmd}` needs an output label")));
                };
                b.step(line, kind, out, inputs)?;
            }
            "prove" => {
                let inner = match rest {
                    ["{", inner @ .., "}"] => inner,
                    _ => return Err(syntax("expected `prove { <goal> <points...> }` on one line".into())),
                };
                let Some((&word, args)) = inner.split_first() else {
                    return Err(FrontendError::MissingGoal);
                };
                let predicate = GoalPredicate::from_word(word)
                    .ok_or_else(|| syntax(format!("unsupported goal `{word}`")))?;
                b.goal(line, predicate, args)?;
            }
            other => return Err(FrontendError::UnknownCommand { line, name: other.to_string() }),
        }
    }
    b.finish("conjecture")
}
