//! Uniform prover contract: registry, format negotiation, execution and
//! output post-processing.

mod exec;
mod negotiate;
mod registry;
mod szs;

pub use exec::{run, RunRequest, GRACE, TEMP_PREFIX};
pub use negotiate::{negotiate_format, ConversionPlan};
pub use registry::{ProverKind, ProverSpec, Registry, RegistryError, POST_PROCESSORS};
pub use szs::postprocess_szs;
