use clap::Parser;

fn main() {
    let cli = tnvs::cli::Cli::parse();
    std::process::exit(tnvs::cli::run(cli));
}
