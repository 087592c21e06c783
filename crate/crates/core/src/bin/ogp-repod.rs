//! Problem repository daemon and ingest tool.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use ogp::format::Format;
use ogp::repo::{serve, Store, DEFAULT_PORT};

#[derive(Parser)]
#[command(name = "ogp-repod", version, about = "Geometry problem repository server")]
struct Cli {
    #[arg(long, default_value = ".")]
    root: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PORT)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    bind: String,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Add or replace a problem.
    Ingest(Ingest),
    /// Print the stored problem ids.
    List,
}

#[derive(Args)]
struct Ingest {
    #[arg(long)]
    id: String,
    #[arg(long, default_value = "")]
    title: String,
    /// `<format>=<path>`, repeatable; a fof file is required.
    #[arg(long = "file", value_parser = parse_file, required = true)]
    files: Vec<(Format, PathBuf)>,
    #[arg(long)]
    overwrite: bool,
}

fn parse_file(s: &str) -> Result<(Format, PathBuf), String> {
    let (f, p) = s.split_once('=').ok_or("expected <format>=<path>")?;
    Ok((f.parse()?, PathBuf::from(p)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let store = match Store::open(&cli.root) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("ogp-repod: {}: {e}", cli.root.display());
            return ExitCode::FAILURE;
        }
    };
    match cli.command {
        Some(Command::Ingest(i)) => {
            let mut files = BTreeMap::new();
            for (f, p) in i.files {
                if files.insert(f, p).is_some() {
                    eprintln!("ogp-repod: format {f} given twice");
                    return ExitCode::FAILURE;
                }
            }
            match store.ingest(&i.id, &i.title, &files, i.overwrite) {
                Ok(meta) => {
                    let formats: Vec<&str> = meta.formats.iter().map(|f| f.name()).collect();
                    println!("{} [{}]", meta.id, formats.join(","));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("ogp-repod: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Some(Command::List) => {
            for id in store.ids() {
                println!("{id}");
            }
            ExitCode::SUCCESS
        }
        None => match serve(Arc::new(store), &cli.bind, cli.port) {
            Ok(handle) => {
                println!("listening on {}", handle.addr());
                handle.join();
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("ogp-repod: cannot listen on {}:{}: {e}", cli.bind, cli.port);
                ExitCode::FAILURE
            }
        },
    }
}
