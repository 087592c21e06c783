//! The uniform outcome record shared by every prover.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Proved,
    Disproved,
    Unknown,
    Timeout,
    ResourceOut,
    Error,
}

impl Status {
    pub const ALL: [Status; 6] =
        [Status::Proved, Status::Disproved, Status::Unknown, Status::Timeout, Status::ResourceOut, Status::Error];

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::Disproved => "disproved",
            Status::Unknown => "unknown",
            Status::Timeout => "timeout",
            Status::ResourceOut => "resource_out",
            Status::Error => "error",
        }
    }

    /// Proved or Disproved.
    pub fn is_definitive(self) -> bool {
        matches!(self, Status::Proved | Status::Disproved)
    }

    /// `ogp` exit code for a final status.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Proved => 0,
            Status::Disproved => 1,
            Status::Unknown => 2,
            Status::Timeout | Status::ResourceOut => 3,
            Status::Error => 4,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Status::ALL.into_iter().find(|st| st.as_str() == s).ok_or_else(|| format!("unknown status `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub prover: String,
    pub status: Status,
    pub time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof_path: Option<PathBuf>,
    #[serde(default)]
    pub raw_output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl RunReport {
    pub fn error(prover: &str, time_ms: u64, detail: impl Into<String>) -> Self {
        RunReport {
            prover: prover.to_string(),
            status: Status::Error,
            time_ms,
            proof_path: None,
            raw_output: String::new(),
            detail: Some(detail.into()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let mut s = format!("{}: {} in {} ms", self.prover, self.status, self.time_ms);
        if let Some(p) = &self.proof_path {
            s.push_str(&format!(" (proof: {})", p.display()));
        }
        if let Some(d) = &self.detail {
            s.push_str(&format!(" [{d}]"));
        }
        s
    }
}

/// What a native prover executable prints on standard output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NativeEnvelope {
    pub status: Status,
    pub time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof_path: Option<PathBuf>,
}
