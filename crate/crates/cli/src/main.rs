use clap::Parser;

fn main() {
    std::process::exit(hypconst_cli::run(hypconst_cli::Cli::parse()));
}
