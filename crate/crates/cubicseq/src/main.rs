use clap::Parser;
use cubicseq::cli;

fn main() {
    let args = cli::Cli::parse();
    std::process::exit(cli::run(args));
}
