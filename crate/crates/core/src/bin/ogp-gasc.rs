//! Batch competition runner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ogp::cli::PROVERS_ENV;
use ogp::gasc::{emit, run_competition, score, scores_text, CompetitionConfig, RunOptions, TableFormat};
use ogp::repo::endpoint_from_env;
use ogp::runtime::Registry;

#[derive(Parser)]
#[command(name = "ogp-gasc", version, about = "Run every prover on every problem and rank them")]
struct Args {
    config: PathBuf,
    /// Concurrent (prover, problem) cells. Values above 1 make times less comparable.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "csv")]
    format: TableFormat,
    /// Prover registry; defaults to the `OGP_PROVERS` file or the built-in one.
    #[arg(long)]
    provers: Option<PathBuf>,
    /// Override the config's output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    match go(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ogp-gasc: {e}");
            ExitCode::from(4)
        }
    }
}

fn go(args: Args) -> Result<(), Box<dyn std::error::Error>> {
    let mut config = CompetitionConfig::load(&args.config)?;
    if let Some(dir) = args.output_dir {
        config.output_dir = dir;
    }
    let registry = match args.provers.or_else(|| std::env::var_os(PROVERS_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)) {
        Some(p) => Registry::load(&p)?,
        None => Registry::default(),
    };
    let opts = RunOptions { jobs: args.jobs, endpoint: Some(endpoint_from_env()) };
    let matrix = run_competition(&config, &registry, &opts)?;
    let table = score(&matrix);
    let files = emit(&table, &matrix, &config.output_dir, args.format)?;
    print!("{}", String::from_utf8(scores_text(&table, args.format)?)?);
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}
