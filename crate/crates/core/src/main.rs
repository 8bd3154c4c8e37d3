use clap::Parser;

fn main() {
    let cli = mhessian::cli::Cli::parse();
    std::process::exit(mhessian::cli::run(cli));
}
