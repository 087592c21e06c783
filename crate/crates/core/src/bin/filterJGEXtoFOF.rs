//! Converts a JGEX conjecture to FOF.

use clap::Parser;
use ogp::filters::{filter_main, FilterArgs};
use ogp::format::Format;

#[derive(Parser)]
#[command(name = "filterJGEXtoFOF", version, about = "Convert a JGEX conjecture to FOF")]
struct Cli {
    #[command(flatten)]
    args: FilterArgs,
}

fn main() {
    std::process::exit(filter_main(Format::Jgex, Cli::parse().args));
}
