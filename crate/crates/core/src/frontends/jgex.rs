//! JGEX subset (uppercase keywords, one statement per line):
//!
//! ```text
//! POINT <labels...>
//! MIDPOINT <M> <A> <B>
//! FOOT <F> <P> <A> <B>
//! INTERSECTION <P> <A> <B> <C> <D>
//! SHOW <COLL|PARA|PERP|CONG|MIDP|EQANGLE|CYCLIC> <args...>
//! ```
//!
//! `#` starts a comment.

use super::model::{Builder, FrontendError, GeoConjecture, GoalPredicate, StepKind};

fn goal_keyword(w: &str) -> Option<GoalPredicate> {
    Some(match w {
        "COLL" => GoalPredicate::Collinear,
        "PARA" => GoalPredicate::Parallel,
        "PERP" => GoalPredicate::Perpendicular,
        "CONG" => GoalPredicate::Congruent,
        "MIDP" => GoalPredicate::Midpoint,
        "EQANGLE" => GoalPredicate::EqAngle,
        "CYCLIC" => GoalPredicate::Cyclic,
        _ => return None,
    })
}

pub fn parse_jgex(text: &str) -> Result<GeoConjecture, FrontendError> {
    let mut b = Builder::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let code = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = code.split_whitespace().collect();
        let Some((&cmd, rest)) = words.split_first() else {
            continue;
        };
        let syntax = |message: String| FrontendError::Syntax { line, message };
        match cmd {
            "POINT" => {
                if rest.is_empty() {
                    return Err(syntax("POINT needs at least one label".into()));
                }
                for label in rest {
                    b.step(line, StepKind::FreePoint, label, &[])?;
                }
            }
            "MIDPOINT" | "FOOT" | "INTERSECTION" => {
                let kind = match cmd {
                    "MIDPOINT" => StepKind::Midpoint,
                    "FOOT" => StepKind::Foot,
                    _ => StepKind::IntersectLines,
                };
                let Some((out, inputs)) = rest.split_first() else {
                    return Err(syntax(format!("{cmd} needs an output label")));
                };
                b.step(line, kind, out, inputs)?;
            }
            "SHOW" => {
                let Some((&word, args)) = rest.split_first() else {
                    return Err(FrontendError::MissingGoal);
                };
                let predicate = goal_keyword(word).ok_or_else(|| syntax(format!("unsupported goal `{word}`")))?;
                b.goal(line, predicate, args)?;
            }
            other => return Err(FrontendError::UnknownCommand { line, name: other.to_string() }),
        }
    }
    b.finish("conjecture")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_goal_still_parses() {
        let c = parse_jgex("POINT A B C\nMIDPOINT M A B\nSHOW PARA M C A C").unwrap();
        assert_eq!(c.points, ["A", "B", "C", "M"]);
        assert_eq!(c.steps.len(), 4);
        assert_eq!(c.goal.predicate, GoalPredicate::Parallel);
        assert_eq!(c.goal.args, ["M", "C", "A", "C"]);
    }

    #[test]
    fn empty_show_is_missing_goal() {
        assert_eq!(parse_jgex("POINT A B\nSHOW\n"), Err(FrontendError::MissingGoal));
        assert_eq!(parse_jgex("POINT A B\n"), Err(FrontendError::MissingGoal));
    }

    #[test]
    fn lowercase_keywords_rejected() {
        assert!(matches!(parse_jgex("point A\n"), Err(FrontendError::UnknownCommand { .. })));
        assert!(matches!(parse_jgex("POINT A\nSHOW RATIO A A"), Err(FrontendError::Syntax { .. })));
    }
}
