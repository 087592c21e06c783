//! Converts a GCL conjecture to FOF.

use clap::Parser;
use ogp::filters::{filter_main, FilterArgs};
use ogp::format::Format;

#[derive(Parser)]
#[command(name = "filterGCLtoFOF", version, about = "Convert a GCL conjecture to FOF")]
struct Cli {
    #[command(flatten)]
    args: FilterArgs,
}

fn main() {
    std::process::exit(filter_main(Format::Gcl, Cli::parse().args));
}
