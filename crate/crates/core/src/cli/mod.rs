//! The `ogp` command.

mod dispatch;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

pub use dispatch::{dispatch, Action, ProveAction, Source, UsageError, DEFAULT_TIMEOUT, USAGE};

use crate::fof::load_flattened;
use crate::format::{extension_of, Format};
use crate::portfolio::{execute, extract_features, select, Mode, PolicyTable};
use crate::repo::{client_get, endpoint_from_env};
use crate::report::RunReport;
use crate::runtime::{run, Registry, RunRequest, TEMP_PREFIX};

pub const PROVERS_ENV: &str = "OGP_PROVERS";
pub const POLICY_ENV: &str = "OGP_POLICY";
/// Upper bound on a repository fetch.
pub const FETCH_TIMEOUT: Duration = Duration::from_secs(10);
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Choice {
    Prover(String),
    Portfolio,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChoiceError {
    #[error("prover `{0}` is not registered (see ogp -p)")]
    Unregistered(String),
    #[error("no default prover for extension `{0}`")]
    NoDefault(String),
    #[error("`{0}` has no file extension to pick a prover by")]
    NoExtension(String),
}

/// Explicit prover, else `.fof` or a repository source goes to the
/// portfolio, else the extension's registered default.
pub fn choose_prover(action: &ProveAction, registry: &Registry) -> Result<Choice, ChoiceError> {
    if let Some(name) = &action.prover {
        return match registry.get(name) {
            Some(_) => Ok(Choice::Prover(name.clone())),
            None => Err(ChoiceError::Unregistered(name.clone())),
        };
    }
    let path = match &action.source {
        Source::Tgtp(_) => return Ok(Choice::Portfolio),
        Source::File(p) => p,
    };
    let ext = extension_of(path).ok_or_else(|| ChoiceError::NoExtension(path.display().to_string()))?;
    if ext == Format::Fof.extension() {
        return Ok(Choice::Portfolio);
    }
    registry.default_for(&ext).map(|p| Choice::Prover(p.name.clone())).ok_or(ChoiceError::NoDefault(ext))
}

/// Process environment consulted by `run_main`.
#[derive(Debug, Clone, Default)]
pub struct CliEnv {
    pub endpoint: String,
    pub provers: Option<PathBuf>,
    pub policy: Option<PathBuf>,
}

impl CliEnv {
    pub fn from_process() -> Self {
        let path = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
        CliEnv { endpoint: endpoint_from_env(), provers: path(PROVERS_ENV), policy: path(POLICY_ENV) }
    }
}

fn load_registry(env: &CliEnv) -> Result<Registry, String> {
    match &env.provers {
        Some(p) => Registry::load(p).map_err(|e| e.to_string()),
        None => Ok(Registry::default()),
    }
}

/// Runs `ogp` with `argv` (program name excluded) and returns the exit code.
pub fn run_main(argv: &[String], env: &CliEnv, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match main_inner(argv, env, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "ogp: {msg}");
            EXIT_USAGE
        }
    }
}

fn main_inner(argv: &[String], env: &CliEnv, out: &mut dyn Write) -> Result<i32, String> {
    let action = dispatch(argv).map_err(|e| format!("{e} (see ogp -h)"))?;
    let w = |out: &mut dyn Write, s: &str| out.write_all(s.as_bytes()).map_err(|e| e.to_string());
    let prove = match action {
        Action::Help => {
            w(out, USAGE)?;
            return Ok(0);
        }
        Action::Version => {
            w(out, &format!("ogp {}\n", env!("CARGO_PKG_VERSION")))?;
            return Ok(0);
        }
        Action::ListProvers => {
            w(out, &load_registry(env)?.table())?;
            return Ok(0);
        }
        Action::Prove(p) => p,
    };
    let registry = load_registry(env)?;
    let choice = choose_prover(&prove, &registry).map_err(|e| e.to_string())?;

    // Keeps a fetched conjecture on disk for the duration of the run.
    let _fetched: Option<tempfile::NamedTempFile>;
    let (path, format): (PathBuf, Format) = match &prove.source {
        Source::File(p) => {
            let f = Format::from_path(p).ok_or_else(|| format!("{}: unrecognised conjecture format", p.display()))?;
            if !p.is_file() {
                return Err(format!("{}: no such file", p.display()));
            }
            _fetched = None;
            (p.clone(), f)
        }
        Source::Tgtp(id) => {
            let wanted = match &choice {
                Choice::Portfolio => Format::Fof,
                Choice::Prover(name) => registry.get(name).expect("chosen prover is registered").formats[0],
            };
            let (got, content) =
                client_get(&env.endpoint, id, wanted, FETCH_TIMEOUT.min(prove.timeout.max(Duration::from_secs(1))))
                    .map_err(|e| e.to_string())?;
            let mut tmp = tempfile::Builder::new()
                .prefix(TEMP_PREFIX)
                .suffix(got.extension())
                .tempfile()
                .map_err(|e| format!("cannot store fetched problem: {e}"))?;
            tmp.write_all(content.as_bytes()).map_err(|e| e.to_string())?;
            let p = tmp.path().to_path_buf();
            _fetched = Some(tmp);
            (p, got)
        }
    };

    let report = match choice {
        Choice::Prover(name) => {
            let spec = registry.get(&name).expect("chosen prover is registered");
            let req = RunRequest::new(prove.timeout).options(&prove.prover_options);
            run(spec, &path, format, &req)
        }
        Choice::Portfolio => {
            if !prove.prover_options.is_empty() {
                return Err("prover options need a named prover; the portfolio takes none".into());
            }
            portfolio_run(&path, format, &prove, &registry, env)?
        }
    };
    let text = if prove.json { report.to_json() + "\n" } else { human(&report) };
    w(out, &text)?;
    Ok(report.status.exit_code())
}

fn portfolio_run(
    path: &Path,
    format: Format,
    prove: &ProveAction,
    registry: &Registry,
    env: &CliEnv,
) -> Result<RunReport, String> {
    if format != Format::Fof {
        return Err(format!("the portfolio needs FOF input, got {format}"));
    }
    let doc = load_flattened(path, &[]).map_err(|e| e.to_string())?;
    let policy = match &env.policy {
        Some(p) => PolicyTable::load(p).map_err(|e| e.to_string())?,
        None => PolicyTable::default(),
    };
    let plan = select(&extract_features(&doc), registry, &policy, prove.timeout).map_err(|e| e.to_string())?;
    let mode = if prove.parallel { Mode::Parallel } else { Mode::Sequential };
    Ok(execute(&plan, registry, path, format, mode))
}

fn human(r: &RunReport) -> String {
    let mut s = r.summary();
    s.push('\n');
    s
}
