//! Open geometry prover toolkit.
//!
//! Conjectures written in GCL, JGEX or GeoGebra XML are converted to a
//! common TPTP FOF form, proved by the native deductive-database prover or
//! by registered external provers (directly or through a syntactic
//! portfolio), fetched from a problem repository service, and compared in
//! batch competitions.

pub mod fof;
pub mod frontends;
pub mod filters;
pub mod format;
pub mod cancel;
pub mod ddfa;
pub mod report;
pub mod runtime;
pub mod portfolio;
pub mod repo;
pub mod cli;
pub mod gasc;
