use clap::Parser;

fn main() {
    let cli = hypospec_cli::Cli::parse();
    std::process::exit(hypospec_cli::run(cli));
}
