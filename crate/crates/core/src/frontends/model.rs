use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    FreePoint,
    Midpoint,
    Foot,
    IntersectLines,
    CircleCenter3,
}

impl StepKind {
    pub fn arity(self) -> usize {
        match self {
            StepKind::FreePoint => 0,
            StepKind::Midpoint => 2,
            StepKind::Foot => 3,
            StepKind::IntersectLines => 4,
            StepKind::CircleCenter3 => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionStep {
    pub kind: StepKind,
    pub output: String,
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GoalPredicate {
    Collinear,
    Parallel,
    Perpendicular,
    Congruent,
    Midpoint,
    EqAngle,
    Cyclic,
}

impl GoalPredicate {
    pub fn arity(self) -> usize {
        match self {
            GoalPredicate::Collinear | GoalPredicate::Midpoint => 3,
            GoalPredicate::Parallel
            | GoalPredicate::Perpendicular
            | GoalPredicate::Congruent
            | GoalPredicate::Cyclic => 4,
            GoalPredicate::EqAngle => 8,
        }
    }

    /// The GCL goal keyword.
    pub fn word(self) -> &'static str {
        match self {
            GoalPredicate::Collinear => "collinear",
            GoalPredicate::Parallel => "parallel",
            GoalPredicate::Perpendicular => "perpendicular",
            GoalPredicate::Congruent => "congruent",
            GoalPredicate::Midpoint => "midpoint",
            GoalPredicate::EqAngle => "eqangle",
            GoalPredicate::Cyclic => "cyclic",
        }
    }

    pub fn from_word(w: &str) -> Option<Self> {
        Some(match w {
            "collinear" => GoalPredicate::Collinear,
            "parallel" => GoalPredicate::Parallel,
            "perpendicular" => GoalPredicate::Perpendicular,
            "congruent" => GoalPredicate::Congruent,
            "midpoint" => GoalPredicate::Midpoint,
            "eqangle" => GoalPredicate::EqAngle,
            "cyclic" => GoalPredicate::Cyclic,
            _ => return None,
        })
    }
}

impl fmt::Display for GoalPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalStatement {
    pub predicate: GoalPredicate,
    pub args: Vec<String>,
}

/// A dialect-neutral geometric conjecture: a straight-line construction
/// followed by one goal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeoConjecture {
    pub name: String,
    /// Every label in definition order (free points and step outputs).
    pub points: Vec<String>,
    pub steps: Vec<ConstructionStep>,
    pub goal: GoalStatement,
}

impl GeoConjecture {
    /// Structural equality ignoring `name`.
    pub fn same_construction(&self, other: &GeoConjecture) -> bool {
        self.points == other.points && self.steps == other.steps && self.goal == other.goal
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: point `{label}` is not declared")]
    Undeclared { line: usize, label: String },
    #[error("line {line}: point `{label}` is already declared")]
    Duplicate { line: usize, label: String },
    #[error("no goal statement")]
    MissingGoal,
    #[error("line {line}: second goal statement")]
    DuplicateGoal { line: usize },
    #[error("line {line}: goal `{predicate}` takes {expected} points, got {got}")]
    GoalArity { line: usize, predicate: GoalPredicate, expected: usize, got: usize },
    #[error("line {line}: unknown command `{name}`")]
    UnknownCommand { line: usize, name: String },
    #[error("invalid XML: {0}")]
    Xml(String),
}

pub(crate) fn is_label(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Accumulates a construction while checking declaration order.
#[derive(Default)]
pub(crate) struct Builder {
    points: Vec<String>,
    steps: Vec<ConstructionStep>,
    goal: Option<GoalStatement>,
}

impl Builder {
    pub fn is_declared(&self, label: &str) -> bool {
        self.points.iter().any(|p| p == label)
    }

    fn check_label(line: usize, label: &str) -> Result<(), FrontendError> {
        if is_label(label) {
            Ok(())
        } else {
            Err(FrontendError::Syntax { line, message: format!("invalid point label `{label}`") })
        }
    }

    fn require(&self, line: usize, label: &str) -> Result<(), FrontendError> {
        Self::check_label(line, label)?;
        if self.is_declared(label) {
            Ok(())
        } else {
            Err(FrontendError::Undeclared { line, label: label.to_string() })
        }
    }

    pub fn step(&mut self, line: usize, kind: StepKind, output: &str, inputs: &[&str]) -> Result<(), FrontendError> {
        if inputs.len() != kind.arity() {
            return Err(FrontendError::Syntax {
                line,
                message: format!("{kind:?} takes {} input points, got {}", kind.arity(), inputs.len()),
            });
        }
        for i in inputs {
            self.require(line, i)?;
        }
        Self::check_label(line, output)?;
        if self.is_declared(output) {
            return Err(FrontendError::Duplicate { line, label: output.to_string() });
        }
        self.points.push(output.to_string());
        self.steps.push(ConstructionStep {
            kind,
            output: output.to_string(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
        });
        Ok(())
    }

    pub fn goal(&mut self, line: usize, predicate: GoalPredicate, args: &[&str]) -> Result<(), FrontendError> {
        if self.goal.is_some() {
            return Err(FrontendError::DuplicateGoal { line });
        }
        if args.len() != predicate.arity() {
            return Err(FrontendError::GoalArity { line, predicate, expected: predicate.arity(), got: args.len() });
        }
        for a in args {
            self.require(line, a)?;
        }
        self.goal = Some(GoalStatement { predicate, args: args.iter().map(|s| s.to_string()).collect() });
        Ok(())
    }

    pub fn finish(self, name: &str) -> Result<GeoConjecture, FrontendError> {
        let goal = self.goal.ok_or(FrontendError::MissingGoal)?;
        Ok(GeoConjecture { name: name.to_string(), points: self.points, steps: self.steps, goal })
    }
}
