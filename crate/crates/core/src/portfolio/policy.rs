use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::features::SyntacticFeatures;
use crate::ddfa::PROVER_NAME as DDFA;
use crate::runtime::Registry;

/// Preference-list token standing for every external prover in registry
/// order.
pub const EXTERNALS: &str = "@externals";

/// All present fields must hold.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Condition {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dd_vocabulary_only: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub has_quantifiers: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_hypotheses: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_hypotheses: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uses_predicate: Option<String>,
}

impl Condition {
    pub fn holds(&self, f: &SyntacticFeatures) -> bool {
        self.dd_vocabulary_only.is_none_or(|v| v == f.dd_vocabulary_only)
            && self.has_quantifiers.is_none_or(|v| v == f.has_quantifiers)
            && self.min_hypotheses.is_none_or(|n| f.hypothesis_count >= n)
            && self.max_hypotheses.is_none_or(|n| f.hypothesis_count <= n)
            && self.uses_predicate.as_ref().is_none_or(|p| f.predicates.contains_key(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyRule {
    pub when: Condition,
    pub prefer: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyTable {
    #[serde(default)]
    pub rules: Vec<PolicyRule>,
    pub default: Vec<String>,
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed policy: {0}")]
    Malformed(String),
    #[error("policy default preference list is empty")]
    EmptyDefault,
}

impl Default for PolicyTable {
    /// DD vocabulary prefers the native prover; anything else tries the
    /// externals first.
    fn default() -> Self {
        PolicyTable {
            rules: vec![PolicyRule {
                when: Condition { dd_vocabulary_only: Some(true), ..Default::default() },
                prefer: vec![DDFA.into(), EXTERNALS.into()],
            }],
            default: vec![EXTERNALS.into(), DDFA.into()],
        }
    }
}

impl PolicyTable {
    pub fn from_json(text: &str) -> Result<Self, PolicyError> {
        let table: PolicyTable = serde_json::from_str(text).map_err(|e| PolicyError::Malformed(e.to_string()))?;
        if table.default.is_empty() {
            return Err(PolicyError::EmptyDefault);
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, PolicyError> {
        let text = fs::read_to_string(path).map_err(|source| PolicyError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("policy serializes")
    }

    /// The first matching rule's list, else the default.
    pub fn preference(&self, f: &SyntacticFeatures) -> &[String] {
        self.rules.iter().find(|r| r.when.holds(f)).map(|r| r.prefer.as_slice()).unwrap_or(&self.default)
    }

    /// Preference with `@externals` expanded, unregistered names dropped
    /// and repeats removed.
    pub fn ranked(&self, f: &SyntacticFeatures, registry: &Registry) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |name: &str| {
            if registry.get(name).is_some() && !out.iter().any(|n| n == name) {
                out.push(name.to_string());
            }
        };
        for entry in self.preference(f) {
            if entry == EXTERNALS {
                registry.externals().for_each(|p| push(&p.name));
            } else {
                push(entry);
            }
        }
        out
    }
}
