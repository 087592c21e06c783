//! Converts a GeoGebra XML conjecture to FOF.

use clap::Parser;
use ogp::filters::{filter_main, FilterArgs};
use ogp::format::Format;

#[derive(Parser)]
#[command(name = "filterGEOGEBRAtoFOF", version, about = "Convert a GeoGebra XML conjecture to FOF")]
struct Cli {
    #[command(flatten)]
    args: FilterArgs,
}

fn main() {
    std::process::exit(filter_main(Format::Geogebra, Cli::parse().args));
}
