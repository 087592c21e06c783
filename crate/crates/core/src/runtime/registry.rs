use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::ddfa::PROVER_NAME as DDFA;
use crate::format::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProverKind {
    Native,
    External,
}

/// Post-processors that turn foreign output into a verdict.
pub const POST_PROCESSORS: [&str; 1] = ["szs"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverSpec {
    pub name: String,
    pub kind: ProverKind,
    pub formats: Vec<Format>,
    pub exec: Option<PathBuf>,
    /// Argument template; `{input}` and `{timeout}` (whole seconds) are
    /// substituted.
    pub args: Vec<String>,
    /// Without one, the last line of standard output must be the report
    /// envelope JSON.
    pub post: Option<String>,
    pub default_for: Vec<String>,
}

impl ProverSpec {
    pub fn builtin_ddfa() -> Self {
        ProverSpec {
            name: DDFA.to_string(),
            kind: ProverKind::Native,
            formats: vec![Format::Fof],
            exec: None,
            args: Vec::new(),
            post: None,
            default_for: [Format::Gcl, Format::Jgex, Format::Geogebra].iter().map(|f| f.extension().into()).collect(),
        }
    }

    pub fn accepts(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed prover registry: {0}")]
    Malformed(String),
    #[error("prover `{name}`: {message}")]
    Invalid { name: String, message: String },
    #[error("prover `{0}` is declared twice")]
    DuplicateName(String),
    #[error("extension `{ext}` is the default of both `{first}` and `{second}`")]
    DuplicateDefault { ext: String, first: String, second: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    provers: Vec<ConfigEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigEntry {
    name: String,
    kind: ProverKind,
    #[serde(default)]
    exec: Option<PathBuf>,
    formats: Vec<Format>,
    #[serde(default)]
    args: Vec<String>,
    #[serde(default)]
    post: Option<String>,
    #[serde(default)]
    default_for: Vec<String>,
}

/// Registered provers in declaration order; `ddfa` is always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    provers: Vec<ProverSpec>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry { provers: vec![ProverSpec::builtin_ddfa()] }
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn invalid(name: &str, message: impl Into<String>) -> RegistryError {
    RegistryError::Invalid { name: name.to_string(), message: message.into() }
}

impl Registry {
    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let text = fs::read_to_string(path).map_err(|source| RegistryError::Io { path: path.into(), source })?;
        Registry::from_json(&text, path.parent())
    }

    /// Relative `exec` paths containing a separator resolve against `base`.
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self, RegistryError> {
        let config: ConfigFile = serde_json::from_str(text).map_err(|e| RegistryError::Malformed(e.to_string()))?;
        let mut declared: Vec<ProverSpec> = Vec::new();
        for e in config.provers {
            if !is_identifier(&e.name) {
                return Err(invalid(&e.name, "name must be a nonempty identifier"));
            }
            if declared.iter().any(|p| p.name == e.name) {
                return Err(RegistryError::DuplicateName(e.name));
            }
            if e.formats.is_empty() {
                return Err(invalid(&e.name, "`formats` must not be empty"));
            }
            if let Some(post) = &e.post {
                if !POST_PROCESSORS.contains(&post.as_str()) {
                    return Err(invalid(&e.name, format!("unknown post-processor `{post}`")));
                }
            }
            if let Some(ext) = e.default_for.iter().find(|x| !x.starts_with('.') || x.len() < 2) {
                return Err(invalid(&e.name, format!("`{ext}` is not an extension like `.gcl`")));
            }
            let exec = match (e.kind, e.exec) {
                (ProverKind::Native, Some(_)) => return Err(invalid(&e.name, "native provers take no `exec`")),
                (ProverKind::Native, None) if e.name != DDFA => {
                    return Err(invalid(&e.name, format!("the only native prover is `{DDFA}`")))
                }
                (ProverKind::Native, None) => None,
                (ProverKind::External, None) => return Err(invalid(&e.name, "external provers need `exec`")),
                (ProverKind::External, Some(p)) => Some(match base {
                    Some(b) if p.is_relative() && p.components().count() > 1 => b.join(p),
                    _ => p,
                }),
            };
            if e.kind == ProverKind::Native && e.formats != [Format::Fof] {
                return Err(invalid(&e.name, "the native prover accepts exactly [\"fof\"]"));
            }
            declared.push(ProverSpec {
                name: e.name,
                kind: e.kind,
                formats: e.formats,
                exec,
                args: e.args,
                post: e.post,
                default_for: e.default_for,
            });
        }

        let mut owner: HashMap<&str, &str> = HashMap::new();
        for p in &declared {
            for ext in &p.default_for {
                if let Some(first) = owner.insert(ext, &p.name) {
                    return Err(RegistryError::DuplicateDefault {
                        ext: ext.clone(),
                        first: first.to_string(),
                        second: p.name.clone(),
                    });
                }
            }
        }
        // Builtin defaults yield to any declared default for the same
        // extension.
        let mut provers = Vec::with_capacity(declared.len() + 1);
        if !declared.iter().any(|p| p.name == DDFA) {
            let mut ddfa = ProverSpec::builtin_ddfa();
            ddfa.default_for.retain(|ext| !owner.contains_key(ext.as_str()));
            provers.push(ddfa);
        }
        provers.extend(declared);
        Ok(Registry { provers })
    }

    pub fn provers(&self) -> &[ProverSpec] {
        &self.provers
    }

    pub fn get(&self, name: &str) -> Option<&ProverSpec> {
        self.provers.iter().find(|p| p.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.provers.iter().map(|p| p.name.as_str())
    }

    /// External provers, in registry order.
    pub fn externals(&self) -> impl Iterator<Item = &ProverSpec> {
        self.provers.iter().filter(|p| p.kind == ProverKind::External)
    }

    pub fn default_for(&self, ext: &str) -> Option<&ProverSpec> {
        self.provers.iter().find(|p| p.default_for.iter().any(|e| e == ext))
    }

    /// Human-readable table for `ogp -p`.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for p in &self.provers {
            let formats: Vec<&str> = p.formats.iter().map(|f| f.name()).collect();
            let kind = match p.kind {
                ProverKind::Native => "native".to_string(),
                ProverKind::External => format!("external {}", p.exec.as_deref().unwrap_or(Path::new("?")).display()),
            };
            out.push_str(&format!("{:<12} {:<8} formats={}", p.name, kind, formats.join(",")));
            if !p.default_for.is_empty() {
                out.push_str(&format!(" default_for={}", p.default_for.join(",")));
            }
            out.push('\n');
        }
        out
    }
}
