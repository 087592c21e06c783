use std::fs;
use std::io::{Read, Write};
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, ExitStatus, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use super::negotiate::{negotiate_format, ConversionPlan};
use super::registry::{ProverKind, ProverSpec};
use super::szs::postprocess_szs;
use crate::cancel::CancelToken;
use crate::ddfa::{prove_with_cancel, SaturationLimits};
use crate::filters::convert_text;
use crate::fof::{parse_fof, resolve_includes, DEFAULT_AXIOM_INCLUDE};
use crate::format::Format;
use crate::report::{NativeEnvelope, RunReport, Status};

/// Allowed overrun past the requested timeout.
pub const GRACE: Duration = Duration::from_millis(500);
/// How long a terminated process group gets before `SIGKILL`.
const TERM_WAIT: Duration = Duration::from_millis(200);
const POLL: Duration = Duration::from_millis(5);

pub const TEMP_PREFIX: &str = "ogp-";

#[derive(Debug, Clone, Default)]
pub struct RunRequest {
    pub timeout: Duration,
    /// Appended verbatim after the expanded template.
    pub prover_options: Vec<String>,
    pub cancel: Option<CancelToken>,
}

impl RunRequest {
    pub fn new(timeout: Duration) -> Self {
        RunRequest { timeout, ..Default::default() }
    }

    pub fn options(mut self, options: &[String]) -> Self {
        self.prover_options = options.to_vec();
        self
    }

    pub fn cancel_on(mut self, token: CancelToken) -> Self {
        self.cancel = Some(token);
        self
    }
}

fn ms(d: Duration) -> u64 {
    d.as_millis().try_into().unwrap_or(u64::MAX)
}

/// Runs one prover on one conjecture file.
pub fn run(spec: &ProverSpec, input: &Path, source: Format, req: &RunRequest) -> RunReport {
    let start = Instant::now();
    let plan = negotiate_format(spec, source);
    let fail = |detail: String| RunReport::error(&spec.name, ms(start.elapsed()), detail);
    if let ConversionPlan::Unsupported(reason) = &plan {
        return fail(reason.clone());
    }
    let text = match fs::read(input) {
        Ok(bytes) => bytes,
        Err(e) => return fail(format!("{}: {e}", input.display())),
    };
    // Conversion result, as text, when a filter is needed.
    let converted = match plan {
        ConversionPlan::ViaFilter(from) => {
            let Ok(s) = std::str::from_utf8(&text) else {
                return fail(format!("{}: not valid UTF-8", input.display()));
            };
            match convert_text(from, s, DEFAULT_AXIOM_INCLUDE) {
                Ok(fof) => Some(fof),
                Err(e) => return fail(format!("{}: {e}", input.display())),
            }
        }
        _ => None,
    };
    let mut report = match spec.kind {
        ProverKind::Native => run_native(spec, input, &text, converted.as_deref(), req),
        ProverKind::External => run_external(spec, input, converted.as_deref(), req),
    };
    report.time_ms = ms(start.elapsed());
    report
}

fn native_limits(req: &RunRequest) -> Result<SaturationLimits, String> {
    let mut limits = SaturationLimits::with_timeout(req.timeout);
    let mut it = req.prover_options.iter();
    while let Some(opt) = it.next() {
        let mut value = |name: &str| -> Result<usize, String> {
            it.next()
                .and_then(|v| v.parse::<usize>().ok())
                .filter(|v| *v > 0)
                .ok_or_else(|| format!("{name} needs a positive integer"))
        };
        match opt.as_str() {
            "--max-facts" => limits.max_facts = value("--max-facts")?,
            "--max-rounds" => limits.max_rounds = value("--max-rounds")?,
            other => return Err(format!("ddfa: unknown option `{other}`")),
        }
    }
    Ok(limits)
}

fn run_native(spec: &ProverSpec, input: &Path, raw: &[u8], converted: Option<&str>, req: &RunRequest) -> RunReport {
    let fail = |detail: String| RunReport::error(&spec.name, 0, detail);
    let limits = match native_limits(req) {
        Ok(l) => l,
        Err(e) => return fail(e),
    };
    let text = match converted {
        Some(t) => t,
        None => match std::str::from_utf8(raw) {
            Ok(t) => t,
            Err(_) => return fail(format!("{}: not valid UTF-8", input.display())),
        },
    };
    let doc = match parse_fof(text) {
        Ok(d) => d,
        Err(e) => return fail(format!("{}:{e}", input.display())),
    };
    let flat = match resolve_includes(&doc, input.parent(), &[]) {
        Ok(d) => d,
        Err(e) => return fail(e.to_string()),
    };
    let outcome = prove_with_cancel(&flat, limits, req.cancel.clone());
    let mut report = RunReport {
        prover: spec.name.clone(),
        status: outcome.status,
        time_ms: ms(outcome.elapsed),
        proof_path: None,
        raw_output: outcome.proof.clone().unwrap_or_default(),
        detail: outcome.detail,
    };
    if let Some(proof) = outcome.proof {
        match write_temp(".proof", proof.as_bytes()).and_then(|f| f.keep().map_err(|e| e.error)) {
            Ok((_, path)) => report.proof_path = Some(path),
            Err(e) => return fail(format!("cannot write proof file: {e}")),
        }
    }
    report
}

fn write_temp(suffix: &str, bytes: &[u8]) -> std::io::Result<tempfile::NamedTempFile> {
    let mut f = tempfile::Builder::new().prefix(TEMP_PREFIX).suffix(suffix).tempfile()?;
    f.write_all(bytes)?;
    f.flush()?;
    Ok(f)
}

fn expand(template: &[String], input: &Path, timeout: Duration) -> Vec<String> {
    let secs = timeout.as_secs() + u64::from(timeout.subsec_nanos() > 0);
    let secs = secs.max(1).to_string();
    let input = input.to_string_lossy();
    template.iter().map(|a| a.replace("{input}", &input).replace("{timeout}", &secs)).collect()
}

fn signal_group(pgid: u32, signal: libc::c_int) {
    // SAFETY: kill(2) has no memory-safety preconditions; a stale group
    // only yields ESRCH, which is ignored.
    unsafe {
        libc::kill(-(pgid as libc::pid_t), signal);
    }
}

/// SIGTERM the group, give the leader a short grace, then SIGKILL whatever
/// is left of the group and reap the leader.
fn terminate(child: &mut Child) -> std::io::Result<ExitStatus> {
    let pgid = child.id();
    signal_group(pgid, libc::SIGTERM);
    let until = Instant::now() + TERM_WAIT;
    while Instant::now() < until {
        if child.try_wait()?.is_some() {
            break;
        }
        thread::sleep(POLL);
    }
    signal_group(pgid, libc::SIGKILL);
    child.wait()
}

enum Ended {
    Exited(ExitStatus),
    TimedOut,
    Cancelled,
}

fn spawn_reader(mut r: impl Read + Send + 'static) -> mpsc::Receiver<Vec<u8>> {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = r.read_to_end(&mut buf);
        let _ = tx.send(buf);
    });
    rx
}

fn run_external(spec: &ProverSpec, input: &Path, converted: Option<&str>, req: &RunRequest) -> RunReport {
    let start = Instant::now();
    let fail = |detail: String| RunReport::error(&spec.name, 0, detail);
    let Some(exec) = spec.exec.as_deref() else {
        return fail("external prover has no executable".into());
    };
    let temp;
    let input_path: PathBuf = match converted {
        Some(fof) => match write_temp(Format::Fof.extension(), fof.as_bytes()) {
            Ok(f) => {
                temp = f;
                temp.path().to_path_buf()
            }
            Err(e) => return fail(format!("cannot write temporary input: {e}")),
        },
        None => input.to_path_buf(),
    };
    let mut args = expand(&spec.args, &input_path, req.timeout);
    args.extend(req.prover_options.iter().cloned());

    let mut cmd = Command::new(exec);
    cmd.args(&args).stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped()).process_group(0);
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => return fail(format!("cannot run {}: {e}", exec.display())),
    };
    let out_rx = spawn_reader(child.stdout.take().expect("piped stdout"));
    let err_rx = spawn_reader(child.stderr.take().expect("piped stderr"));

    let deadline = start + req.timeout;
    let ended = loop {
        match child.try_wait() {
            Ok(Some(status)) => {
                // Leftover members of the group do not outlive the run.
                signal_group(child.id(), libc::SIGKILL);
                break Ok(Ended::Exited(status));
            }
            Ok(None) => {}
            Err(e) => break Err(e),
        }
        if req.cancel.as_ref().is_some_and(CancelToken::is_cancelled) {
            break terminate(&mut child).map(|_| Ended::Cancelled);
        }
        if Instant::now() >= deadline {
            break terminate(&mut child).map(|_| Ended::TimedOut);
        }
        thread::sleep(POLL);
    };
    let ended = match ended {
        Ok(e) => e,
        Err(e) => {
            let _ = terminate(&mut child);
            return fail(format!("waiting for {}: {e}", exec.display()));
        }
    };

    // Pipes close once the group is gone; a detached grandchild holding
    // them open only costs the bounded wait.
    let collect = |rx: mpsc::Receiver<Vec<u8>>| {
        rx.recv_timeout(TERM_WAIT).map(|b| String::from_utf8_lossy(&b).into_owned()).unwrap_or_default()
    };
    let stdout = collect(out_rx);
    let stderr = collect(err_rx);
    let mut raw_output = stdout.clone();
    if !stderr.is_empty() {
        if !raw_output.is_empty() && !raw_output.ends_with('\n') {
            raw_output.push('\n');
        }
        raw_output.push_str(&stderr);
    }
    let mut report = RunReport {
        prover: spec.name.clone(),
        status: Status::Unknown,
        time_ms: 0,
        proof_path: None,
        raw_output,
        detail: None,
    };
    let exit = match ended {
        Ended::TimedOut => {
            report.status = Status::Timeout;
            report.detail = Some(format!("killed after {} ms", ms(req.timeout)));
            return report;
        }
        Ended::Cancelled => {
            report.status = Status::Timeout;
            report.detail = Some("cancelled".into());
            return report;
        }
        Ended::Exited(status) => status,
    };

    match spec.post.as_deref() {
        Some("szs") => {
            let (status, self_time) = postprocess_szs(&report.raw_output);
            report.status = status;
            report.detail = self_time.map(|t| format!("self-reported {t} ms"));
        }
        Some(other) => {
            report.status = Status::Error;
            report.detail = Some(format!("unknown post-processor `{other}`"));
        }
        None => match stdout.lines().rev().find(|l| !l.trim().is_empty()).map(serde_json::from_str::<NativeEnvelope>) {
            Some(Ok(env)) => {
                report.status = env.status;
                report.detail = Some(format!("self-reported {} ms", env.time_ms));
                if env.status == Status::Proved {
                    report.proof_path = env.proof_path;
                }
            }
            _ => {
                report.status = if exit.success() { Status::Unknown } else { Status::Error };
                report.detail = Some("no report envelope on standard output".into());
            }
        },
    }
    if !exit.success() && report.status == Status::Unknown {
        report.detail = Some(match report.detail.take() {
            Some(d) => format!("{d}; exited with {exit}"),
            None => format!("exited with {exit}"),
        });
    }
    report
}
