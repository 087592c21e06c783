use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::ast::{FofDocument, Role};
use super::parser::{parse_fof, ParseError};

/// Include path understood by every filter: the bundled axiom set.
pub const DEFAULT_AXIOM_INCLUDE: &str = "axioms/ddfa.ax";

/// The bundled deductive-database axiom file. Used when
/// [`DEFAULT_AXIOM_INCLUDE`] is not found on disk.
pub const BUNDLED_AXIOMS: &str = include_str!("../../axioms/ddfa.ax");

#[derive(Debug, Error)]
pub enum IncludeError {
    #[error("include `{path}` not found (searched: {})", display_roots(.searched))]
    NotFound { path: String, searched: Vec<PathBuf> },
    #[error("include cycle: {}", .chain.join(" -> "))]
    Cycle { chain: Vec<String> },
    #[error("formula name `{name}` defined in both {first} and {second}")]
    NameCollision { name: String, first: String, second: String },
    #[error("axiom file {file} contains conjecture `{name}`")]
    ConjectureInAxiomFile { file: String, name: String },
    #[error("{file}: {source}")]
    Parse { file: String, source: ParseError },
    #[error("reading {}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

fn display_roots(roots: &[PathBuf]) -> String {
    if roots.is_empty() {
        return "no roots".into();
    }
    roots.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Source {
    File(PathBuf),
    Bundled,
}

impl Source {
    fn label(&self) -> String {
        match self {
            Source::File(p) => p.display().to_string(),
            Source::Bundled => format!("<bundled {DEFAULT_AXIOM_INCLUDE}>"),
        }
    }

    fn dir(&self) -> Option<&Path> {
        match self {
            Source::File(p) => p.parent(),
            Source::Bundled => None,
        }
    }
}

struct Resolver<'a> {
    search_paths: &'a [PathBuf],
    stack: Vec<Source>,
    done: HashSet<Source>,
    owners: HashMap<String, String>,
    out: FofDocument,
}

impl Resolver<'_> {
    fn locate(&self, path: &str, including_dir: Option<&Path>) -> Result<Source, IncludeError> {
        let mut searched: Vec<PathBuf> = self.search_paths.to_vec();
        if let Some(dir) = including_dir {
            searched.push(dir.to_path_buf());
        }
        for root in &searched {
            let candidate = root.join(path);
            if candidate.is_file() {
                let canonical = candidate.canonicalize().unwrap_or(candidate);
                return Ok(Source::File(canonical));
            }
        }
        if path == DEFAULT_AXIOM_INCLUDE {
            return Ok(Source::Bundled);
        }
        Err(IncludeError::NotFound { path: path.to_string(), searched })
    }

    fn load(&self, source: &Source) -> Result<FofDocument, IncludeError> {
        let text = match source {
            Source::Bundled => BUNDLED_AXIOMS.to_string(),
            Source::File(p) => {
                fs::read_to_string(p).map_err(|e| IncludeError::Io { path: p.clone(), source: e })?
            }
        };
        let doc = parse_fof(&text).map_err(|e| IncludeError::Parse { file: source.label(), source: e })?;
        if let Some(c) = doc.conjecture() {
            return Err(IncludeError::ConjectureInAxiomFile { file: source.label(), name: c.name.clone() });
        }
        Ok(doc)
    }

    fn absorb(&mut self, doc: FofDocument, origin: &str, base: Option<&Path>) -> Result<(), IncludeError> {
        for inc in &doc.includes {
            let source = self.locate(inc, base)?;
            if self.stack.contains(&source) {
                let mut chain: Vec<String> = self.stack.iter().map(Source::label).collect();
                chain.push(source.label());
                return Err(IncludeError::Cycle { chain });
            }
            // A file reached twice through different includes is read once.
            if self.done.contains(&source) {
                continue;
            }
            let included = self.load(&source)?;
            self.stack.push(source.clone());
            let label = source.label();
            self.absorb(included, &label, source.dir())?;
            self.stack.pop();
            self.done.insert(source);
        }
        for f in doc.formulas {
            if let Some(first) = self.owners.get(&f.name) {
                return Err(IncludeError::NameCollision {
                    name: f.name.clone(),
                    first: first.clone(),
                    second: origin.to_string(),
                });
            }
            self.owners.insert(f.name.clone(), origin.to_string());
            self.out.formulas.push(f);
        }
        Ok(())
    }
}

/// Flattens `doc` by splicing in every included file.
///
/// Includes are looked up under each of `search_paths` in order, then in
/// `origin_dir` (the directory of the including file). The bundled axiom
/// file answers for [`DEFAULT_AXIOM_INCLUDE`] when no file on disk does.
/// Included formulas come first, in include order.
pub fn resolve_includes(
    doc: &FofDocument,
    origin_dir: Option<&Path>,
    search_paths: &[PathBuf],
) -> Result<FofDocument, IncludeError> {
    if doc.includes.is_empty() {
        return Ok(doc.clone());
    }
    let mut r = Resolver {
        search_paths,
        stack: Vec::new(),
        done: HashSet::new(),
        owners: HashMap::new(),
        out: FofDocument::default(),
    };
    r.absorb(doc.clone(), "<input>", origin_dir)?;
    debug_assert!(r.out.formulas.iter().filter(|f| f.role == Role::Conjecture).count() <= 1);
    Ok(r.out)
}

/// Reads and flattens a FOF file, searching `search_paths` and the file's
/// own directory.
pub fn load_flattened(path: &Path, search_paths: &[PathBuf]) -> Result<FofDocument, IncludeError> {
    let text = fs::read_to_string(path).map_err(|e| IncludeError::Io { path: path.to_path_buf(), source: e })?;
    let doc = parse_fof(&text).map_err(|e| IncludeError::Parse { file: path.display().to_string(), source: e })?;
    resolve_includes(&doc, path.parent(), search_paths)
}
