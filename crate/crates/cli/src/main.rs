use clap::Parser;

fn main() {
    let cli = ideal_cli::args::Cli::parse();
    std::process::exit(ideal_cli::run(cli));
}
