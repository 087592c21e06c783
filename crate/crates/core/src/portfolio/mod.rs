//! Simple-syntactic portfolio: features of the problem pick a prover
//! preference order; the schedule runs it under one global time limit.

mod features;
mod policy;

use std::path::Path;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use features::{extract_features, is_dd_vocabulary, SyntacticFeatures, DD_VOCABULARY, EQUALITY};
pub use policy::{Condition, PolicyError, PolicyRule, PolicyTable, EXTERNALS};

use crate::cancel::CancelToken;
use crate::format::Format;
use crate::report::{RunReport, Status};
use crate::runtime::{run, Registry, RunRequest};

pub const PORTFOLIO: &str = "portfolio";
/// Percentage of the global budget given to the first slot.
pub const FIRST_SLOT_PERCENT: u64 = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub prover: String,
    pub budget_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortfolioPlan {
    pub slots: Vec<Slot>,
    pub global_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PortfolioError {
    #[error("no registered prover appears in the policy's preference list")]
    EmptyPlan,
    #[error("the portfolio needs a positive time limit")]
    NoTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Sequential,
    Parallel,
}

/// Splits `total` over `n` slots: 60% to the first, the rest evenly, with
/// the division remainder going to the last slot.
pub fn split_budget(total: u64, n: usize) -> Vec<u64> {
    match n {
        0 => vec![],
        1 => vec![total],
        _ => {
            let first = total * FIRST_SLOT_PERCENT / 100;
            let rest = total - first;
            let others = (n - 1) as u64;
            let mut v = vec![first];
            v.extend(std::iter::repeat_n(rest / others, n - 1));
            *v.last_mut().expect("n > 1") += rest % others;
            v
        }
    }
}

pub fn select(
    features: &SyntacticFeatures,
    registry: &Registry,
    policy: &PolicyTable,
    global: Duration,
) -> Result<PortfolioPlan, PortfolioError> {
    let global_ms: u64 = global.as_millis().try_into().unwrap_or(u64::MAX);
    if global_ms == 0 {
        return Err(PortfolioError::NoTime);
    }
    let mut ranked = policy.ranked(features, registry);
    if ranked.is_empty() {
        return Err(PortfolioError::EmptyPlan);
    }
    // Drop trailing slots until every budget is positive.
    let budgets = loop {
        let b = split_budget(global_ms, ranked.len());
        if b.iter().all(|&x| x > 0) {
            break b;
        }
        ranked.pop();
    };
    let slots = ranked.into_iter().zip(budgets).map(|(prover, budget_ms)| Slot { prover, budget_ms }).collect();
    Ok(PortfolioPlan { slots, global_ms })
}

fn slot_line(r: &RunReport) -> String {
    format!("{}={} ({} ms)", r.prover, r.status, r.time_ms)
}

fn aggregate(mut reports: Vec<RunReport>, winner: Option<usize>, start: Instant) -> RunReport {
    let slots: Vec<String> = reports.iter().map(slot_line).collect();
    let elapsed = start.elapsed().as_millis().try_into().unwrap_or(u64::MAX);
    if let Some(w) = winner {
        let mut r = reports.swap_remove(w);
        let own = r.detail.take();
        r.detail = Some(match own {
            Some(d) => format!("{d}; portfolio slots: {}", slots.join(", ")),
            None => format!("portfolio slots: {}", slots.join(", ")),
        });
        r.time_ms = elapsed;
        return r;
    }
    let all_errors = !reports.is_empty() && reports.iter().all(|r| r.status == Status::Error);
    RunReport {
        prover: PORTFOLIO.into(),
        status: if all_errors { Status::Error } else { Status::Unknown },
        time_ms: elapsed,
        proof_path: None,
        raw_output: String::new(),
        detail: Some(format!("no definitive verdict; portfolio slots: {}", slots.join(", "))),
    }
}

fn missing(name: &str) -> RunReport {
    RunReport::error(name, 0, format!("prover `{name}` is not registered"))
}

/// Runs the plan. Sequential mode gives each slot its own budget and stops
/// at the first definitive verdict; parallel mode starts every slot with
/// the full global budget and cancels the rest once one is definitive.
pub fn execute(plan: &PortfolioPlan, registry: &Registry, input: &Path, format: Format, mode: Mode) -> RunReport {
    let start = Instant::now();
    match mode {
        Mode::Sequential => {
            let mut reports = Vec::new();
            for slot in &plan.slots {
                let report = match registry.get(&slot.prover) {
                    Some(spec) => run(spec, input, format, &RunRequest::new(Duration::from_millis(slot.budget_ms))),
                    None => missing(&slot.prover),
                };
                let done = report.status.is_definitive();
                reports.push(report);
                if done {
                    let w = reports.len() - 1;
                    return aggregate(reports, Some(w), start);
                }
            }
            aggregate(reports, None, start)
        }
        Mode::Parallel => {
            let token = CancelToken::new();
            let (tx, rx) = mpsc::channel();
            thread::scope(|scope| {
                for (i, slot) in plan.slots.iter().enumerate() {
                    let tx = tx.clone();
                    let token = token.clone();
                    scope.spawn(move || {
                        let report = match registry.get(&slot.prover) {
                            Some(spec) => {
                                let req = RunRequest::new(Duration::from_millis(plan.global_ms)).cancel_on(token);
                                run(spec, input, format, &req)
                            }
                            None => missing(&slot.prover),
                        };
                        let _ = tx.send((i, report));
                    });
                }
                drop(tx);
                let mut reports: Vec<Option<RunReport>> = vec![None; plan.slots.len()];
                let mut winner = None;
                for (i, report) in rx {
                    if winner.is_none() && report.status.is_definitive() {
                        winner = Some(i);
                        token.cancel();
                    }
                    reports[i] = Some(report);
                }
                let reports: Vec<RunReport> = reports.into_iter().map(|r| r.expect("every slot reports")).collect();
                aggregate(reports, winner, start)
            })
        }
    }
}
