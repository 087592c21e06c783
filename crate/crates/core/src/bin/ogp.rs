use ogp::cli::{run_main, CliEnv};

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let code = run_main(&argv, &CliEnv::from_process(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
