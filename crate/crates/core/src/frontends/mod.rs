//! Source dialect parsers producing [`GeoConjecture`] values.

mod gcl;
mod ggb;
mod jgex;
mod model;

pub use gcl::parse_gcl;
pub use ggb::parse_ggb_xml;
pub use jgex::parse_jgex;
pub use model::{ConstructionStep, FrontendError, GeoConjecture, GoalPredicate, GoalStatement, StepKind};
