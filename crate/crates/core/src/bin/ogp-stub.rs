//! Stand-in for an external prover, used by the test suites.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::thread;
use std::time::Duration;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(about = "Fake external prover for tests")]
struct Cli {
    /// Append one line describing this call to FILE.
    #[arg(long, global = true)]
    record: Option<PathBuf>,
    #[command(subcommand)]
    mode: Mode,
}

#[derive(Subcommand)]
enum Mode {
    /// Sleep, optionally ignoring SIGTERM.
    Sleep {
        seconds: f64,
        #[arg(long)]
        ignore_term: bool,
        /// Append the pid of every stub process to FILE.
        #[arg(long)]
        marker: Option<PathBuf>,
        /// Also start a sleeping child in the same process group.
        #[arg(long)]
        child: bool,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        rest: Vec<String>,
    },
    /// Print an SZS status line and an optional elapsed-time line.
    Szs {
        status: String,
        #[arg(long)]
        elapsed: Option<String>,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        rest: Vec<String>,
    },
    /// Print a report envelope.
    Envelope {
        status: String,
        #[arg(long, default_value_t = 1)]
        time_ms: u64,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        rest: Vec<String>,
    },
}

fn append(path: &PathBuf, line: &str) {
    let mut f = OpenOptions::new().create(true).append(true).open(path).expect("open record file");
    writeln!(f, "{line}").expect("write record file");
}

fn main() {
    let cli = Cli::parse();
    if let Some(record) = &cli.record {
        let args: Vec<String> = std::env::args().skip(1).collect();
        append(record, &args.join(" "));
    }
    match cli.mode {
        Mode::Sleep { seconds, ignore_term, marker, child, .. } => {
            if ignore_term {
                // SAFETY: installing SIG_IGN has no preconditions.
                unsafe {
                    libc::signal(libc::SIGTERM, libc::SIG_IGN);
                }
            }
            if let Some(m) = &marker {
                append(m, &std::process::id().to_string());
            }
            if child {
                let mut cmd = Command::new(std::env::current_exe().expect("own path"));
                cmd.arg("sleep").arg(seconds.to_string());
                if ignore_term {
                    cmd.arg("--ignore-term");
                }
                if let Some(m) = &marker {
                    cmd.arg("--marker").arg(m);
                }
                // Left running on purpose: it is the straggler a killer must reach.
                #[allow(clippy::zombie_processes)]
                let _straggler = cmd.spawn().expect("spawn child stub");
            }
            thread::sleep(Duration::from_secs_f64(seconds.max(0.0)));
            println!("% SZS status GaveUp");
        }
        Mode::Szs { status, elapsed, .. } => {
            println!("% SZS status {status} for stub");
            if let Some(x) = elapsed {
                println!("% Time elapsed: {x} s");
            }
        }
        Mode::Envelope { status, time_ms, .. } => {
            println!("{{\"status\":\"{status}\",\"time_ms\":{time_ms}}}");
        }
    }
}
