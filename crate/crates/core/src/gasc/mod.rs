//! Competition harness: every prover on every problem under one time
//! limit, then a ranking by problems solved and time spent solving them.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use crate::format::Format;
use crate::repo::{client_get, valid_id};
use crate::report::{RunReport, Status};
use crate::runtime::{run, Registry, RunRequest, TEMP_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompetitionConfig {
    pub provers: Vec<String>,
    /// File paths, or repository ids like `GEO0001`.
    pub problems: Vec<String>,
    #[serde(rename = "per_problem_timeout", alias = "per_problem_timeout_ms")]
    pub per_problem_timeout_ms: u64,
    pub output_dir: PathBuf,
}

#[derive(Debug, Error)]
pub enum GascError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed competition config: {0}")]
    Config(String),
    #[error("prover `{0}` is not registered")]
    Unregistered(String),
    #[error("problem `{name}`: {message}")]
    Problem { name: String, message: String },
    #[error("writing results: {0}")]
    Csv(#[from] csv::Error),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> GascError + '_ {
    move |source| GascError::Io { path: path.to_path_buf(), source }
}

impl CompetitionConfig {
    /// Relative problem paths and `output_dir` resolve against the config
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, GascError> {
        let text = fs::read_to_string(path).map_err(io(path))?;
        let mut c: CompetitionConfig = serde_json::from_str(&text).map_err(|e| GascError::Config(e.to_string()))?;
        if let Some(base) = path.parent() {
            for p in &mut c.problems {
                if !valid_id(p) && Path::new(p).is_relative() {
                    *p = base.join(&*p).to_string_lossy().into_owned();
                }
            }
            if c.output_dir.is_relative() {
                c.output_dir = base.join(&c.output_dir);
            }
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), GascError> {
        if self.provers.is_empty() || self.problems.is_empty() {
            return Err(GascError::Config("provers and problems must be nonempty".into()));
        }
        if self.per_problem_timeout_ms == 0 {
            return Err(GascError::Config("per_problem_timeout_ms must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Concurrent cells; 1 keeps timings comparable.
    pub jobs: usize,
    /// Repository endpoint for problem ids.
    pub endpoint: Option<String>,
}

/// One cell per (prover, problem), prover-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultMatrix {
    pub provers: Vec<String>,
    pub problems: Vec<String>,
    pub cells: Vec<Vec<RunReport>>,
}

impl ResultMatrix {
    pub fn cell(&self, prover: usize, problem: usize) -> &RunReport {
        &self.cells[prover][problem]
    }

    pub fn statuses(&self) -> Vec<Vec<Status>> {
        self.cells.iter().map(|row| row.iter().map(|r| r.status).collect()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreRow {
    pub prover: String,
    pub solved: usize,
    /// Sum over solved problems.
    pub time_ms: u64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreTable {
    pub rows: Vec<ScoreRow>,
}

struct Problem {
    name: String,
    path: PathBuf,
    format: Format,
    _temp: Option<tempfile::NamedTempFile>,
}

fn problem_name(entry: &str) -> String {
    if valid_id(entry) {
        return entry.to_string();
    }
    let file = Path::new(entry).file_name().and_then(|n| n.to_str()).unwrap_or(entry);
    match Format::from_path(Path::new(file)) {
        Some(f) => file[..file.len() - f.extension().len()].to_string(),
        None => file.to_string(),
    }
}

fn acquire(entry: &str, endpoint: Option<&str>) -> Result<Problem, GascError> {
    let name = problem_name(entry);
    let err = |message: String| GascError::Problem { name: entry.to_string(), message };
    if valid_id(entry) {
        let ep = endpoint.ok_or_else(|| err("repository id but no endpoint configured".into()))?;
        let (format, content) = client_get(ep, entry, Format::Fof, Duration::from_secs(10)).map_err(|e| err(e.to_string()))?;
        let mut tmp = tempfile::Builder::new()
            .prefix(TEMP_PREFIX)
            .suffix(format.extension())
            .tempfile()
            .map_err(|e| err(e.to_string()))?;
        tmp.write_all(content.as_bytes()).map_err(|e| err(e.to_string()))?;
        return Ok(Problem { name, path: tmp.path().to_path_buf(), format, _temp: Some(tmp) });
    }
    let path = PathBuf::from(entry);
    let format = Format::from_path(&path).ok_or_else(|| err("unrecognised file extension".into()))?;
    fs::File::open(&path).map_err(|e| err(e.to_string()))?;
    Ok(Problem { name, path, format, _temp: None })
}

fn safe(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' }).collect()
}

/// Runs every cell. All provers and problems are checked before the first
/// run; raw outputs are archived under `output_dir/raw`.
pub fn run_competition(config: &CompetitionConfig, registry: &Registry, opts: &RunOptions) -> Result<ResultMatrix, GascError> {
    config.validate()?;
    let specs = config
        .provers
        .iter()
        .map(|p| registry.get(p).ok_or_else(|| GascError::Unregistered(p.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let problems =
        config.problems.iter().map(|e| acquire(e, opts.endpoint.as_deref())).collect::<Result<Vec<_>, _>>()?;
    let mut seen = HashSet::new();
    for p in &problems {
        if !seen.insert(p.name.as_str()) {
            return Err(GascError::Problem { name: p.name.clone(), message: "listed twice".into() });
        }
    }
    let raw_dir = config.output_dir.join("raw");
    fs::create_dir_all(&raw_dir).map_err(io(&raw_dir))?;

    let cells: Vec<(usize, usize)> =
        (0..specs.len()).flat_map(|i| (0..problems.len()).map(move |j| (i, j))).collect();
    let timeout = Duration::from_millis(config.per_problem_timeout_ms);
    let results: Mutex<BTreeMap<(usize, usize), RunReport>> = Mutex::new(BTreeMap::new());
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let k = next.fetch_add(1, Ordering::SeqCst);
        let Some(&(i, j)) = cells.get(k) else { break };
        let p = &problems[j];
        let report = run(specs[i], &p.path, p.format, &RunRequest::new(timeout));
        results.lock().expect("results lock").insert((i, j), report);
    };
    let jobs = opts.jobs.max(1).min(cells.len());
    if jobs == 1 {
        worker();
    } else {
        thread::scope(|s| {
            for _ in 0..jobs {
                s.spawn(worker);
            }
        });
    }
    let mut results = results.into_inner().expect("results lock");
    let mut matrix = ResultMatrix {
        provers: config.provers.clone(),
        problems: problems.iter().map(|p| p.name.clone()).collect(),
        cells: Vec::with_capacity(specs.len()),
    };
    for (i, prover) in config.provers.iter().enumerate() {
        let mut row = Vec::with_capacity(problems.len());
        for (j, problem) in problems.iter().enumerate() {
            let report = results.remove(&(i, j)).expect("every cell ran");
            let log = raw_dir.join(format!("{}__{}.log", safe(prover), safe(&problem.name)));
            fs::write(&log, &report.raw_output).map_err(io(&log))?;
            row.push(report);
        }
        matrix.cells.push(row);
    }
    Ok(matrix)
}

/// Orders by solved descending, then time ascending, then name; equal
/// (solved, time) share a rank and the next rank skips (1, 1, 3).
pub fn score(matrix: &ResultMatrix) -> ScoreTable {
    let mut rows: Vec<ScoreRow> = matrix
        .provers
        .iter()
        .zip(&matrix.cells)
        .map(|(prover, row)| {
            let solved: Vec<&RunReport> = row.iter().filter(|r| r.status.is_definitive()).collect();
            ScoreRow {
                prover: prover.clone(),
                solved: solved.len(),
                time_ms: solved.iter().map(|r| r.time_ms).sum(),
                rank: 0,
            }
        })
        .collect();
    rows.sort_by(|a, b| b.solved.cmp(&a.solved).then(a.time_ms.cmp(&b.time_ms)).then(a.prover.cmp(&b.prover)));
    for k in 0..rows.len() {
        rows[k].rank = if k > 0 && rows[k].solved == rows[k - 1].solved && rows[k].time_ms == rows[k - 1].time_ms {
            rows[k - 1].rank
        } else {
            k + 1
        };
    }
    ScoreTable { rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Csv,
    Markdown,
}

impl std::str::FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(format!("unknown table format `{other}` (csv or markdown)")),
        }
    }
}

pub fn results_csv(matrix: &ResultMatrix) -> Result<Vec<u8>, GascError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["prover", "problem", "status", "time_ms"])?;
    for (prover, row) in matrix.provers.iter().zip(&matrix.cells) {
        for (problem, r) in matrix.problems.iter().zip(row) {
            w.write_record([prover.as_str(), problem.as_str(), r.status.as_str(), &r.time_ms.to_string()])?;
        }
    }
    w.into_inner().map_err(|e| GascError::Csv(e.into_error().into()))
}

pub fn scores_text(table: &ScoreTable, format: TableFormat) -> Result<Vec<u8>, GascError> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["rank", "prover", "solved", "time_ms"])?;
            for r in &table.rows {
                w.write_record([r.rank.to_string(), r.prover.clone(), r.solved.to_string(), r.time_ms.to_string()])?;
            }
            w.into_inner().map_err(|e| GascError::Csv(e.into_error().into()))
        }
        TableFormat::Markdown => {
            let mut s = String::from("| rank | prover | solved | time_ms |\n|---:|---|---:|---:|\n");
            for r in &table.rows {
                s.push_str(&format!("| {} | {} | {} | {} |\n", r.rank, r.prover.replace('|', "\\|"), r.solved, r.time_ms));
            }
            Ok(s.into_bytes())
        }
    }
}

/// Writes `results.csv` and `scores.csv` or `scores.md` into `dir`.
pub fn emit(table: &ScoreTable, matrix: &ResultMatrix, dir: &Path, format: TableFormat) -> Result<Vec<PathBuf>, GascError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let results = dir.join("results.csv");
    fs::write(&results, results_csv(matrix)?).map_err(io(&results))?;
    let scores = dir.join(match format {
        TableFormat::Csv => "scores.csv",
        TableFormat::Markdown => "scores.md",
    });
    fs::write(&scores, scores_text(table, format)?).map_err(io(&scores))?;
    Ok(vec![results, scores])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(status: Status, time_ms: u64) -> RunReport {
        RunReport { prover: String::new(), status, time_ms, proof_path: None, raw_output: String::new(), detail: None }
    }

    fn matrix(rows: &[(&str, &[(Status, u64)])]) -> ResultMatrix {
        let n = rows[0].1.len();
        ResultMatrix {
            provers: rows.iter().map(|r| r.0.to_string()).collect(),
            problems: (0..n).map(|k| format!("p{k}")).collect(),
            cells: rows.iter().map(|r| r.1.iter().map(|&(s, t)| report(s, t)).collect()).collect(),
        }
    }

    #[test]
    fn time_breaks_ties() {
        use Status::*;
        let m = matrix(&[
            ("b", &[(Proved, 400), (Proved, 400), (Disproved, 400)]),
            ("a", &[(Proved, 300), (Proved, 300), (Proved, 300)]),
        ]);
        let t = score(&m);
        assert_eq!((t.rows[0].prover.as_str(), t.rows[0].rank, t.rows[0].time_ms), ("a", 1, 900));
        assert_eq!((t.rows[1].prover.as_str(), t.rows[1].rank, t.rows[1].time_ms), ("b", 2, 1200));
    }

    #[test]
    fn all_unknown_share_rank_one() {
        use Status::*;
        let m = matrix(&[("x", &[(Unknown, 5)]), ("y", &[(Timeout, 9)]), ("z", &[(Error, 1)])]);
        assert!(score(&m).rows.iter().all(|r| r.rank == 1 && r.solved == 0 && r.time_ms == 0));
    }

    #[test]
    fn competition_ranks_skip() {
        use Status::*;
        let m = matrix(&[("a", &[(Proved, 5)]), ("b", &[(Proved, 5)]), ("c", &[(Unknown, 1)])]);
        let ranks: Vec<usize> = score(&m).rows.iter().map(|r| r.rank).collect();
        assert_eq!(ranks, [1, 1, 3]);
    }

    #[test]
    fn csv_layout() {
        let m = matrix(&[("a,b", &[(Status::Proved, 5), (Status::Unknown, 7)])]);
        let text = String::from_utf8(results_csv(&m).unwrap()).unwrap();
        assert_eq!(text, "prover,problem,status,time_ms\n\"a,b\",p0,proved,5\n\"a,b\",p1,unknown,7\n");
        let md = String::from_utf8(scores_text(&score(&m), TableFormat::Markdown).unwrap()).unwrap();
        assert!(md.ends_with("| 1 | a,b | 1 | 5 |\n"));
    }

    #[test]
    fn names() {
        assert_eq!(problem_name("/x/varignon.ggb.xml"), "varignon");
        assert_eq!(problem_name("GEO0001"), "GEO0001");
        assert_eq!(problem_name("a/b.fof"), "b");
    }
}
