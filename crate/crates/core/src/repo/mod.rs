//! Problem repository: on-disk store, line-delimited JSON query server
//! and client.
//!
//! Store layout under the root directory:
//!
//! ```text
//! manifest.json
//! problems/GEO0001/meta.json
//! problems/GEO0001/problem.fof
//! problems/GEO0001/problem.gcl
//! ```
//!
//! Every record has FOF content, so a request for a missing format can
//! always fall back to it.

mod client;
mod protocol;
mod server;
mod store;

pub use client::{client_get, client_list, endpoint_from_env, ClientError, DEFAULT_ENDPOINT, DEFAULT_PORT, ENDPOINT_ENV};
pub use protocol::{ErrorCode, QueryRequest, QueryResponse, ResponseStatus};
pub use server::{answer, serve, ServerHandle, MAX_REQUEST};
#[doc(hidden)]
pub use store::FaultPoint;
pub use store::{file_name, valid_id, ProblemRecord, RecordMeta, Store, StoreError, MANIFEST, META, PROBLEMS_DIR, STORABLE};
