//! The native prover behind its command-line contract: a report envelope
//! on standard output, human text on standard error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use ogp::format::Format;
use ogp::report::{NativeEnvelope, Status};
use ogp::runtime::{run, ProverSpec, RunRequest};

#[derive(Parser)]
#[command(name = "ogp-ddfa", version, about = "Deductive-database geometry prover")]
struct Args {
    /// Conjecture file (.fof, .gcl, .jgex or .ggb.xml).
    input: PathBuf,
    /// Time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Where to write the proof when one is found.
    #[arg(long)]
    proof: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if !(args.timeout.is_finite() && args.timeout > 0.0) {
        eprintln!("ogp-ddfa: --timeout must be a positive number of seconds");
        return ExitCode::from(4);
    }
    let Some(format) = Format::from_path(&args.input) else {
        eprintln!("ogp-ddfa: {}: unrecognised extension", args.input.display());
        return ExitCode::from(4);
    };
    let spec = ProverSpec::builtin_ddfa();
    let mut report = run(&spec, &args.input, format, &RunRequest::new(Duration::from_secs_f64(args.timeout)));
    if let (Some(target), Some(tmp)) = (&args.proof, &report.proof_path) {
        match std::fs::copy(tmp, target) {
            Ok(_) => {
                let _ = std::fs::remove_file(tmp);
                report.proof_path = Some(target.clone());
            }
            Err(e) => {
                eprintln!("ogp-ddfa: cannot write {}: {e}", target.display());
                report.status = Status::Error;
                report.proof_path = None;
            }
        }
    }
    eprintln!("{}", report.summary());
    if !report.raw_output.is_empty() {
        eprint!("{}", report.raw_output);
    }
    let envelope = NativeEnvelope { status: report.status, time_ms: report.time_ms, proof_path: report.proof_path };
    println!("{}", serde_json::to_string(&envelope).expect("envelope serializes"));
    ExitCode::from(report.status.exit_code() as u8)
}
