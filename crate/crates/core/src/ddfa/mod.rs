//! Native deductive-database prover.
//!
//! Ground forward chaining over range-restricted Horn rules (the bundled
//! full-angle style axioms by default) with argument symmetries built in.
//! A fixpoint without the goal yields `Unknown`; this prover never
//! reports `Disproved`.

mod engine;
mod proof;
mod symmetry;

use std::time::{Duration, Instant};

pub use engine::{
    saturate, FactBase, InvalidLimits, ProofDag, ProofNode, Provenance, SaturateError, Saturation, SaturationLimits,
    SaturationStats, Saturator, StopReason,
};
pub use proof::{parse_proof, replay, Justification, ProofStep, ReplayError, ReplaySummary};
pub use symmetry::{canonicalize, canonicalize_atom, CanonError, Fact, Predicate};

use crate::cancel::CancelToken;
use crate::fof::{to_horn_rules, FofDocument};
use crate::report::Status;

pub const PROVER_NAME: &str = "ddfa";

#[derive(Debug, Clone)]
pub struct ProveOutcome {
    pub status: Status,
    pub elapsed: Duration,
    /// Serialized proof; present iff `status` is `Proved`.
    pub proof: Option<String>,
    pub stats: Option<SaturationStats>,
    pub detail: Option<String>,
}

impl ProveOutcome {
    fn error(start: Instant, detail: String) -> Self {
        ProveOutcome { status: Status::Error, elapsed: start.elapsed(), proof: None, stats: None, detail: Some(detail) }
    }
}

/// Proves the conjecture of a flattened document.
pub fn prove(doc: &FofDocument, limits: SaturationLimits) -> ProveOutcome {
    prove_with_cancel(doc, limits, None)
}

pub fn prove_with_cancel(doc: &FofDocument, limits: SaturationLimits, cancel: Option<CancelToken>) -> ProveOutcome {
    let start = Instant::now();
    let problem = match to_horn_rules(doc) {
        Ok(p) => p,
        Err(e) => return ProveOutcome::error(start, e.to_string()),
    };
    let goal = match canonicalize_atom(&problem.goal) {
        Ok(g) => g,
        Err(e) => return ProveOutcome::error(start, format!("goal {}: {e}", problem.goal_name)),
    };
    let mut given = Vec::with_capacity(problem.facts.len());
    for (name, atom) in &problem.facts {
        match canonicalize_atom(atom) {
            Ok(f) => given.push((name.clone(), f)),
            Err(e) => return ProveOutcome::error(start, format!("{name}: {e}")),
        }
    }
    let mut saturator = Saturator::new(&problem.rules, limits).stop_at(goal.clone());
    if let Some(token) = cancel {
        saturator = saturator.cancel_on(token);
    }
    let sat = match saturator.run(&given) {
        Ok(s) => s,
        Err(e) => return ProveOutcome::error(start, e.to_string()),
    };
    let stats = sat.stats.clone();
    let summary = format!("{} rounds, {} derived facts, stopped at {}", stats.rounds, stats.derived, stats.stop);
    let (status, proof, detail) = if sat.base.contains(&goal) {
        (Status::Proved, sat.dag.render_proof(&goal), summary)
    } else {
        match stats.stop {
            StopReason::Fixpoint | StopReason::GoalReached => (Status::Unknown, None, summary),
            StopReason::Timeout => (Status::Timeout, None, summary),
            StopReason::Cancelled => (Status::Timeout, None, "cancelled".to_string()),
            StopReason::FactLimit | StopReason::RoundLimit => (Status::ResourceOut, None, summary),
        }
    };
    ProveOutcome { status, elapsed: start.elapsed(), proof, stats: Some(stats), detail: Some(detail) }
}
